#pragma once

// Two-qubit density-matrix algebra for the entanglement-based picture of
// BB84: Alice's source state, Eve's Pauli channel acting on Bob's qubit in
// either preparation basis, and bit/phase error rates read off the Bell basis.

#include <array>
#include <complex>

#include <Eigen/Core>

namespace weakrand {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4d;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Binary Shannon entropy in bits, with 0·log 0 = 0.
///
/// Inputs within 1e-12 of [0, 1] are clamped; anything further out throws
/// DomainError.
double binary_entropy(double e);

// Single-qubit operators.
const Matrix2& identity2();
const Matrix2& pauli_x();
const Matrix2& pauli_z();
const Matrix2& hadamard();

/// Bell states in the |00>,|01>,|10>,|11> basis.
///   phi1 = (|00> + |11>)/√2   phi2 = (|01> + |10>)/√2
///   phi3 = (|00> - |11>)/√2   phi4 = (|01> - |10>)/√2
struct BellBasis {
    Vector4 phi1, phi2, phi3, phi4;

    const Vector4& operator[](int k) const;
};

const BellBasis& bell_basis();

/// Hermitian, unit-trace, positive semidefinite 4x4 density matrix.
class TwoQubitState {
public:
    /// Validates every invariant; throws ValidationError naming the first that fails.
    explicit TwoQubitState(const Matrix4& matrix);

    static TwoQubitState projector(const Vector4& psi);

    const Matrix4& matrix() const noexcept { return matrix_; }
    Complex operator()(int row, int col) const { return matrix_(row, col); }

    /// <psi|rho|psi> for a real vector psi.
    double expectation(const Vector4& psi) const;

    double min_eigenvalue() const;

private:
    Matrix4 matrix_;
};

/// alpha·a + (1 − alpha)·b, alpha in [0, 1].
TwoQubitState mix(const TwoQubitState& a, const TwoQubitState& b, double alpha);

/// Eve's Pauli channel: q00 ↔ I, q01 ↔ Z, q10 ↔ X, q11 ↔ XZ.
struct PauliChannel {
    double q00 = 1.0;
    double q01 = 0.0;
    double q10 = 0.0;
    double q11 = 0.0;

    /// Throws ValidationError unless each q is in [0,1] and they sum to 1 within 1e-12.
    void validate() const;

    /// Weight of X^u Z^v.
    double weight(int u, int v) const;

    static PauliChannel identity() { return {}; }
    static PauliChannel unit(int u, int v);
};

/// X^u Z^v.
Matrix2 pauli_operator(int u, int v);

struct ErrorRatePair {
    double e_bit = 0.0;
    double e_phase = 0.0;
};

/// |phi><phi| for |phi> = √p0 |00> + √(1 − p0) |11>, where p0 is the
/// probability that Alice encodes bit 0.
TwoQubitState build_source_state(double p0);

/// Sum over (u, v) of q_uv [ p_z (I⊗A) ρ (I⊗A)† + (1 − p_z) (I⊗HAH) ρ (I⊗HAH)† ]
/// with A = X^u Z^v acting on Bob's (second) qubit. p_z is the probability of
/// a rectilinear-basis preparation.
TwoQubitState apply_channel(const TwoQubitState& source, const PauliChannel& channel, double p_z);

/// e_bit = <φ2|ρ|φ2> + <φ4|ρ|φ4>,  e_phase = <φ3|ρ|φ3> + <φ4|ρ|φ4>.
ErrorRatePair error_rates(const TwoQubitState& state);

}  // namespace weakrand
