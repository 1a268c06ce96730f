#pragma once

#include <cstdint>
#include <random>

#include "ttbeam/common.hpp"

namespace ttbeam {

// Independent RNG streams are derived from (master seed, purpose, index).
// Purposes keep optimization samples, evaluation frames and PSO draws on
// disjoint streams by construction.
enum class StreamPurpose : std::uint32_t {
    SampleBank = 1,
    Evaluation = 2,
    PsoInit = 3,
    PsoIter = 4,
    RandomPhase = 5,
    UeDisk = 6,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, StreamPurpose purpose,
                                   std::uint64_t index = 0) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(purpose),
        static_cast<std::uint32_t>(index & 0xffffffffu),
        static_cast<std::uint32_t>(index >> 32),
    };
    return std::mt19937_64(seq);
}

// Gaussian draws via explicit Box-Muller: the stream is fixed by this header
// alone, not by standard-library internals.
class GaussianRng {
public:
    GaussianRng() = default;
    explicit GaussianRng(std::mt19937_64 engine) : engine_(std::move(engine)) {}

    double uniform() {  // U[0,1)
        return std::generate_canonical<double, 53>(engine_);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0,1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Standard circular complex Gaussian, unit total variance.
    cxd cnormal() {
        double re = normal();
        double im = normal();
        return cxd(re, im) * std::numbers::sqrt2_v<double> / 2.0;
    }

    // Entries drawn in column-major order.
    void fill_cnormal(MatrixXcd& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cnormal();
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ttbeam
