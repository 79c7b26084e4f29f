#include "evcal/image_io.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <vector>

#include "evcal/errors.hpp"

namespace evcal {

namespace {

const std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                    0x0d, 0x0a, 0x1a, 0x0a};

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

std::uint32_t get_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<unsigned char>& out, const char type[4],
                  const std::vector<unsigned char>& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

// PNG scanline unfiltering (filters 0..4).
void unfilter_scanlines(std::vector<unsigned char>& raw, int width, int height, int bpp) {
  const int stride = width * bpp;
  std::vector<unsigned char> prev(static_cast<std::size_t>(stride), 0);
  for (int y = 0; y < height; ++y) {
    unsigned char* row = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
    const int filter = row[0];
    unsigned char* cur = row + 1;
    for (int i = 0; i < stride; ++i) {
      const int a = (i >= bpp) ? cur[i - bpp] : 0;            // left
      const int b = prev[i];                                   // up
      const int c = (i >= bpp) ? prev[i - bpp] : 0;            // up-left
      int x = cur[i];
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: {
          const int p = a + b - c;
          const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
          x += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          break;
        }
        default: throw Error("unsupported PNG filter");
      }
      cur[i] = static_cast<unsigned char>(x & 0xff);
    }
    std::memcpy(prev.data(), cur, static_cast<std::size_t>(stride));
  }
}

Image8 read_png(const std::string& path, const std::vector<unsigned char>& buf) {
  if (buf.size() < 8 || !std::equal(kPngSignature.begin(), kPngSignature.end(), buf.begin()))
    throw UnreadableImage(path);

  int width = 0, height = 0, bit_depth = 0, color_type = -1;
  std::vector<unsigned char> idat;
  std::size_t pos = 8;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t len = get_be32(buf.data() + pos);
    if (pos + 12 + len > buf.size()) throw UnreadableImage(path);
    const char* type = reinterpret_cast<const char*>(buf.data() + pos + 4);
    const unsigned char* data = buf.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw UnreadableImage(path);
      width = static_cast<int>(get_be32(data));
      height = static_cast<int>(get_be32(data + 4));
      bit_depth = data[8];
      color_type = data[9];
      if (data[12] != 0) throw UnreadableImage(path);  // interlaced
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (width <= 0 || height <= 0 || bit_depth != 8 ||
      (color_type != 0 && color_type != 2))
    throw UnreadableImage(path);

  const int bpp = (color_type == 0) ? 1 : 3;
  const std::size_t raw_size =
      static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * bpp + 1);
  std::vector<unsigned char> raw(raw_size);
  uLongf dest_len = static_cast<uLongf>(raw_size);
  if (uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      dest_len != raw_size)
    throw UnreadableImage(path);
  unfilter_scanlines(raw, width, height, bpp);

  Image8 img(height, width);
  for (int y = 0; y < height; ++y) {
    const unsigned char* row = raw.data() + static_cast<std::size_t>(y) * (width * bpp + 1) + 1;
    for (int x = 0; x < width; ++x) {
      if (bpp == 1) {
        img(y, x) = row[x];
      } else {
        const int r = row[3 * x], g = row[3 * x + 1], b = row[3 * x + 2];
        img(y, x) = static_cast<std::uint8_t>(
            std::lround(0.299 * r + 0.587 * g + 0.114 * b));
      }
    }
  }
  return img;
}

Image8 read_pgm(const std::string& path, const std::vector<unsigned char>& buf) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < buf.size()) {
      if (std::isspace(buf[pos])) {
        ++pos;
      } else if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < buf.size() && !std::isspace(buf[pos])) tok.push_back(char(buf[pos++]));
    return tok;
  };

  const std::string magic = next_token();
  if (magic != "P5" && magic != "P2") throw UnreadableImage(path);
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (...) {
    throw UnreadableImage(path);
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw UnreadableImage(path);

  Image8 img(height, width);
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    if (buf.size() - pos < static_cast<std::size_t>(width) * height)
      throw UnreadableImage(path);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) img(y, x) = buf[pos++];
  } else {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const std::string tok = next_token();
        if (tok.empty()) throw UnreadableImage(path);
        img(y, x) = static_cast<std::uint8_t>(std::stoi(tok));
      }
  }
  return img;
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableImage(path);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

}  // namespace

void write_pgm(const std::string& path, const Image8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(img.cols()));
  for (Eigen::Index y = 0; y < img.rows(); ++y) {
    for (Eigen::Index x = 0; x < img.cols(); ++x) row[static_cast<std::size_t>(x)] = char(img(y, x));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_png(const std::string& path, const Image8& img) {
  const int w = static_cast<int>(img.cols());
  const int h = static_cast<int>(img.rows());

  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(h) * (w + 1));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < w; ++x) raw.push_back(img(y, x));
  }

  uLongf comp_bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> comp(comp_bound);
  if (compress2(comp.data(), &comp_bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error("PNG compression failed");
  comp.resize(comp_bound);

  std::vector<unsigned char> out(kPngSignature.begin(), kPngSignature.end());
  std::vector<unsigned char> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(w));
  put_be32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);  // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", comp);
  append_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

Image8 read_image(const std::string& path) {
  const std::vector<unsigned char> buf = read_file(path);
  if (buf.size() >= 8 && std::equal(kPngSignature.begin(), kPngSignature.end(), buf.begin()))
    return read_png(path, buf);
  return read_pgm(path, buf);
}

void write_image(const std::string& path, const Image8& img) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".png")
    write_png(path, img);
  else
    write_pgm(path, img);
}

}  // namespace evcal
