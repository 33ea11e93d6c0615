#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "demoflow/errors.hpp"
#include "demoflow/geometry.hpp"

namespace demoflow {

struct Pixel {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
  uint8_t a = 255;
  auto operator<=>(const Pixel&) const = default;
};

// Immutable-by-convention RGBA8 raster. Rows are stored top to bottom.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Pixel fill = {0, 0, 0, 255})
      : w_(width), h_(height), px_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw Error(errc::validation, "image dimensions must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  Size size() const { return {w_, h_}; }

  Pixel at(int x, int y) const { return px_[idx(x, y)]; }
  void set(int x, int y, Pixel p) { px_[idx(x, y)] = p; }
  bool in_bounds(Point p) const { return size().contains(p); }

  const Pixel* data() const { return px_.data(); }
  size_t pixel_count() const { return px_.size(); }

  bool operator==(const Image& o) const {
    return w_ == o.w_ && h_ == o.h_ && px_ == o.px_;
  }

  // Content digest over dimensions and raw pixel bytes.
  std::string sha256_hex() const {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error(errc::io, "EVP_MD_CTX_new failed");
    int32_t dims[2] = {w_, h_};
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, dims, sizeof(dims)) == 1 &&
              EVP_DigestUpdate(ctx, px_.data(), px_.size() * sizeof(Pixel)) == 1 &&
              EVP_DigestFinal_ex(ctx, md, &md_len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error(errc::io, "sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
      out.push_back(hex[md[i] >> 4]);
      out.push_back(hex[md[i] & 0xf]);
    }
    return out;
  }

 private:
  size_t idx(int x, int y) const {
    if (x < 0 || y < 0 || x >= w_ || y >= h_)
      throw Error(errc::domain, "pixel access out of bounds");
    return static_cast<size_t>(y) * w_ + x;
  }

  int w_ = 0;
  int h_ = 0;
  std::vector<Pixel> px_;
};

// A raster screenshot reference: shared immutable pixels plus the content
// digest that doubles as the content address.
struct Observation {
  std::shared_ptr<const Image> image;
  std::string digest;        // "sha256:<hex>"
  int64_t timestamp_ms = 0;

  int width() const { return image ? image->width() : 0; }
  int height() const { return image ? image->height() : 0; }
  const std::string& image_ref() const { return digest; }

  static Observation from_image(Image img, int64_t timestamp_ms) {
    Observation o;
    o.digest = "sha256:" + img.sha256_hex();
    o.image = std::make_shared<const Image>(std::move(img));
    o.timestamp_ms = timestamp_ms;
    return o;
  }
};

}  // namespace demoflow
