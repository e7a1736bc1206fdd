#pragma once

// Seeded synthetic phantoms: overlapping smooth ellipses with varied
// intensities plus mild sinusoidal texture, standing in for anatomical
// slices. Same seed, same image, bit for bit.

#include "fagan/image.hpp"

namespace fagan {

ImageBuffer synthesize_phantom(unsigned seed, std::size_t size, double range = 255.0);

}  // namespace fagan
