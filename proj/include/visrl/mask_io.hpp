#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "visrl/data_prep.hpp"

namespace visrl {

// Turns one mask file into a MaskGrid. Non-zero samples are foreground.
class MaskDecoder {
 public:
  virtual ~MaskDecoder() = default;
  virtual bool accepts(const std::filesystem::path& path) const = 0;
  // Throws DataError if the file is missing or malformed.
  virtual MaskGrid decode(const std::filesystem::path& path) const = 0;
};

// .png (any bit depth / colour type); a pixel is foreground if any colour channel is non-zero.
std::unique_ptr<MaskDecoder> make_png_decoder();
// .pbm / .pgm, ASCII or binary.
std::unique_ptr<MaskDecoder> make_netpbm_decoder();
// .txt: one row per line, '0' background and '1' foreground.
std::unique_ptr<MaskDecoder> make_text_grid_decoder();

class MaskDecoderSet {
 public:
  // Registers the PNG, netpbm and text decoders.
  MaskDecoderSet();

  void add(std::unique_ptr<MaskDecoder> decoder);
  // Uses the first decoder that accepts the path. Throws DataError if none does.
  MaskGrid decode(const std::filesystem::path& path) const;

 private:
  std::vector<std::unique_ptr<MaskDecoder>> decoders_;
};

// '0'/'1' characters, rows concatenated.
MaskGrid mask_from_bitstring(std::size_t width, std::size_t height, const std::string& bits);
std::string mask_to_bitstring(const MaskGrid& mask);

}  // namespace visrl
