#include "visrl/mask_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include <png.h>

#include "visrl/errors.hpp"

namespace visrl {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mask file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PngDecoder final : public MaskDecoder {
 public:
  bool accepts(const std::filesystem::path& path) const override {
    return lower_extension(path) == ".png";
  }

  MaskGrid decode(const std::filesystem::path& path) const override {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
      throw DataError("cannot read PNG " + path.string() + ": " + image.message);
    }
    // RGBA keeps every colour channel; a luminance conversion could round a
    // dim pure-colour pixel to zero. Alpha is ignored.
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
      const std::string msg = image.message;
      png_image_free(&image);
      throw DataError("cannot decode PNG " + path.string() + ": " + msg);
    }
    std::vector<std::uint8_t> bits(std::size_t{image.width} * image.height);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      const std::uint8_t* px = pixels.data() + 4 * i;
      bits[i] = (px[0] | px[1] | px[2]) != 0;
    }
    return MaskGrid(image.width, image.height, std::move(bits));
  }
};

class NetpbmDecoder final : public MaskDecoder {
 public:
  bool accepts(const std::filesystem::path& path) const override {
    const std::string ext = lower_extension(path);
    return ext == ".pbm" || ext == ".pgm";
  }

  MaskGrid decode(const std::filesystem::path& path) const override {
    const std::string data = read_file(path);
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) -> DataError {
      return DataError("malformed netpbm " + path.string() + ": " + why);
    };
    auto skip_space_and_comments = [&] {
      while (pos < data.size()) {
        if (data[pos] == '#') {
          while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
          ++pos;
        } else {
          break;
        }
      }
    };
    auto read_uint = [&]() -> std::size_t {
      skip_space_and_comments();
      if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
        throw fail("expected an integer");
      }
      std::size_t v = 0;
      while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
        v = v * 10 + static_cast<std::size_t>(data[pos++] - '0');
        if (v > (1u << 30)) throw fail("value too large");
      }
      return v;
    };

    if (data.size() < 2 || data[0] != 'P') throw fail("bad magic");
    const char kind = data[1];
    if (kind != '1' && kind != '2' && kind != '4' && kind != '5') throw fail("unsupported kind");
    pos = 2;
    const std::size_t width = read_uint();
    const std::size_t height = read_uint();
    if (width == 0 || height == 0) throw fail("zero dimension");
    const bool bitmap = kind == '1' || kind == '4';
    const std::size_t maxval = bitmap ? 1 : read_uint();
    if (maxval == 0 || maxval > 65535) throw fail("bad maxval");

    std::vector<std::uint8_t> bits(width * height);
    if (kind == '1') {
      for (auto& b : bits) {
        skip_space_and_comments();
        if (pos >= data.size() || (data[pos] != '0' && data[pos] != '1')) throw fail("bad bit");
        b = data[pos++] == '1';
      }
    } else if (kind == '2') {
      for (auto& b : bits) b = read_uint() != 0;
    } else {
      ++pos;  // single whitespace after the header
      if (kind == '4') {
        const std::size_t row_bytes = (width + 7) / 8;
        if (data.size() < pos + row_bytes * height) throw fail("truncated raster");
        for (std::size_t y = 0; y < height; ++y) {
          for (std::size_t x = 0; x < width; ++x) {
            const auto byte = static_cast<unsigned char>(data[pos + y * row_bytes + x / 8]);
            bits[y * width + x] = (byte >> (7 - x % 8)) & 1u;
          }
        }
      } else {
        const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
        if (data.size() < pos + sample_bytes * bits.size()) throw fail("truncated raster");
        for (std::size_t i = 0; i < bits.size(); ++i) {
          bool on = false;
          for (std::size_t k = 0; k < sample_bytes; ++k) on |= data[pos + i * sample_bytes + k] != 0;
          bits[i] = on;
        }
      }
    }
    return MaskGrid(width, height, std::move(bits));
  }
};

class TextGridDecoder final : public MaskDecoder {
 public:
  bool accepts(const std::filesystem::path& path) const override {
    return lower_extension(path) == ".txt";
  }

  MaskGrid decode(const std::filesystem::path& path) const override {
    std::istringstream in(read_file(path));
    std::string line, bits;
    std::size_t width = 0, height = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (height == 0) width = line.size();
      if (line.size() != width) {
        throw DataError("ragged rows in text mask " + path.string(), height + 1);
      }
      bits += line;
      ++height;
    }
    if (height == 0) throw DataError("empty text mask " + path.string());
    return mask_from_bitstring(width, height, bits);
  }
};

}  // namespace

std::unique_ptr<MaskDecoder> make_png_decoder() { return std::make_unique<PngDecoder>(); }
std::unique_ptr<MaskDecoder> make_netpbm_decoder() { return std::make_unique<NetpbmDecoder>(); }
std::unique_ptr<MaskDecoder> make_text_grid_decoder() {
  return std::make_unique<TextGridDecoder>();
}

MaskDecoderSet::MaskDecoderSet() {
  add(make_png_decoder());
  add(make_netpbm_decoder());
  add(make_text_grid_decoder());
}

void MaskDecoderSet::add(std::unique_ptr<MaskDecoder> decoder) {
  decoders_.push_back(std::move(decoder));
}

MaskGrid MaskDecoderSet::decode(const std::filesystem::path& path) const {
  if (!std::filesystem::exists(path)) throw DataError("missing mask file " + path.string());
  for (const auto& d : decoders_) {
    if (d->accepts(path)) return d->decode(path);
  }
  throw DataError("no decoder for mask file " + path.string());
}

MaskGrid mask_from_bitstring(std::size_t width, std::size_t height, const std::string& bits) {
  if (bits.size() != width * height) {
    throw InputError("mask bit string has " + std::to_string(bits.size()) + " cells, expected " +
                     std::to_string(width * height));
  }
  std::vector<std::uint8_t> cells(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw InputError("mask bits must be '0' or '1'");
    cells[i] = bits[i] == '1';
  }
  return MaskGrid(width, height, std::move(cells));
}

std::string mask_to_bitstring(const MaskGrid& mask) {
  std::string out;
  out.reserve(mask.bits().size());
  for (const auto b : mask.bits()) out += b ? '1' : '0';
  return out;
}

}  // namespace visrl
