#pragma once

#include <cstdint>
#include <string>

#include "ctrecov/grad.hpp"

namespace ctrecov {

enum class ImageClass {
  Spikes,
  SignedSpikes,
  TruncatedUniform,
  AltprojAniso,
  AltprojIso,
  AltprojNonneg,
};

const char* image_class_name(ImageClass c);
ImageClass image_class_from_name(const std::string& name);

struct MaskedImage {
  Vec values;  // one entry per inside pixel
  int n_side = 0;
  ImageClass cls = ImageClass::Spikes;
  std::uint64_t seed = 0;
  long target_k = 0;
};

struct GeneratorConfig {
  ImageClass cls = ImageClass::Spikes;
  long k = 0;
  int gray_levels = 40;   // truncated-uniform only
  int max_iters = 3000;   // alternating projection
  int max_restarts = 10;
  std::uint64_t seed = 0;
};

// Exactly k nonzeros at uniformly chosen distinct positions, values i.i.d.
// uniform on [0,1] (or [-1,1] when signed); zero draws are redrawn.
MaskedImage gen_spikes(const DiskMask& mask, long k, bool signed_values,
                       std::uint64_t seed);

// Pixels i.i.d. over the gray-level midpoints of the truncated-uniform
// construction; the number of nonzero finite differences has expectation k.
MaskedImage gen_truncated_uniform(const DiskMask& mask,
                                  const AnisoGradOperator& op, long k, int f,
                                  std::uint64_t seed);

// Alternating projections between the range of D^T and the k-sparse set
// (entrywise, or groupwise with largest 2-norms). Produces an image whose
// gradient has exactly k nonzero entries (or groups); throws
// ConvergenceError after max_restarts failed restarts.
MaskedImage gen_altproj(const AnisoGradOperator& op, long k,
                        std::uint64_t seed, int max_iters = 3000,
                        int max_restarts = 10);
MaskedImage gen_altproj(const IsoGradOperator& op, long k, std::uint64_t seed,
                        int max_iters = 3000, int max_restarts = 10);

// Shift by the smallest constant making all pixel values nonnegative; the
// constant vector is in ker(D^T) so the gradient is unchanged.
MaskedImage to_nonneg(MaskedImage img);

MaskedImage generate_image(const DiskMask& mask, const AnisoGradOperator& op,
                           const GeneratorConfig& cfg);

// CSV with a metadata header (n_side, class, k, seed) then one value per
// masked pixel.
void write_image_csv(const MaskedImage& img, const std::string& path);
MaskedImage read_image_csv(const std::string& path);

// 8-bit grayscale PGM of the full grid, pixels outside the mask black.
void write_image_pgm(const MaskedImage& img, const DiskMask& mask,
                     const std::string& path);

}  // namespace ctrecov
