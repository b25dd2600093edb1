#ifndef SMFKIT_SYSTEM_HPP
#define SMFKIT_SYSTEM_HPP

#include <optional>

#include "smfkit/czono.hpp"
#include "smfkit/matrix.hpp"

namespace smfkit {

// x_{k+1} = a x_k + b w_k,  y_k = c x_k + v_k, with bounded noise ranges and
// a bounded range for the true initial state.
struct LinearSystem {
    Matrix a;
    Matrix b;
    Matrix c;
    CZono w;
    CZono v;
    CZono x0_true;
    double d_w = 0.0;  // Euclidean diameter bound of w's range
    double d_v = 0.0;  // Euclidean diameter bound of v's range

    std::size_t state_dim() const { return a.rows(); }
    std::size_t input_dim() const { return b.cols(); }
    std::size_t output_dim() const { return c.rows(); }

    // checks shapes, nonsingular a, bounded nonempty noise ranges, and fills
    // d_w / d_v from the interval hulls
    void finalize();
};

nlohmann::json to_json(const LinearSystem& sys);
LinearSystem system_from_json(const nlohmann::json& j);

// coordinate change z = p x splitting observable part (first n_o coords) from
// the unobservable remainder:
//   p a p^T = [a_o 0; a_21 a_obar],  c p^T = [c_o 0]
struct ObservabilityDecomposition {
    Matrix p;  // orthogonal
    std::size_t n_o = 0;
    Matrix a_o;
    Matrix a_21;
    Matrix a_obar;
    Matrix b_o;
    Matrix b_obar;
    Matrix c_o;
    std::size_t mu_o = 0;  // observability index of (a_o, c_o)
    bool rank_warning = false;  // singular value within 10x of the rank cutoff
};

Matrix observability_matrix(const Matrix& a, const Matrix& c, std::size_t powers);

// smallest mu with rank [c; ca; ...; ca^{mu-1}] = n, or nullopt if unobservable
std::optional<std::size_t> observability_index(const Matrix& a, const Matrix& c);

ObservabilityDecomposition decompose(const Matrix& a, const Matrix& b, const Matrix& c);

bool is_detectable(const ObservabilityDecomposition& dec);

// inf over gamma in (rho, 1) of max_k gamma^{-k} ||a_obar^k||_inf / (1 - gamma);
// 0 for an empty matrix
double upsilon_inf(const Matrix& a_obar);

struct OitBound {
    std::size_t delta = 0;
    Matrix o_delta;      // [c a^-delta; ...; c a^-1; c]
    double sigma_min = 0.0;
    double d_bar = 0.0;  // diameter bound for the delta-window intersection
};

OitBound oit_bound(const Matrix& a, const Matrix& b, const Matrix& c, double d_w, double d_v,
                   std::size_t delta);

// random generators; deterministic for a fixed seed
LinearSystem random_observable_system(std::uint64_t seed, std::size_t n, std::size_t p,
                                      std::size_t m);
LinearSystem random_detectable_system(std::uint64_t seed, std::size_t n, std::size_t n_o,
                                      std::size_t p, std::size_t m);

}  // namespace smfkit

#endif
