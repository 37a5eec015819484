#include "weakrand/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "weakrand/errors.hpp"

namespace weakrand {

namespace {

constexpr double kEntropyClampTol = 1e-12;
constexpr double kChannelSumTol = 1e-12;

Matrix4 lift_to_second_qubit(const Matrix2& op) {
    Matrix4 out = Matrix4::Zero();
    out.block<2, 2>(0, 0) = op;
    out.block<2, 2>(2, 2) = op;
    return out;
}

Matrix4 conjugate_second_qubit(const Matrix4& rho, const Matrix2& op) {
    const Matrix4 lifted = lift_to_second_qubit(op);
    return lifted * rho * lifted.adjoint();
}

}  // namespace

double binary_entropy(double e) {
    if (!(e >= -kEntropyClampTol && e <= 1.0 + kEntropyClampTol)) {
        throw DomainError("binary_entropy: argument must lie in [0, 1]", e);
    }
    e = std::clamp(e, 0.0, 1.0);
    if (e == 0.0 || e == 1.0) return 0.0;
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

const Matrix2& identity2() {
    static const Matrix2 m = Matrix2::Identity();
    return m;
}

const Matrix2& pauli_x() {
    static const Matrix2 m = [] {
        Matrix2 x;
        x << 0, 1, 1, 0;
        return x;
    }();
    return m;
}

const Matrix2& pauli_z() {
    static const Matrix2 m = [] {
        Matrix2 z;
        z << 1, 0, 0, -1;
        return z;
    }();
    return m;
}

const Matrix2& hadamard() {
    static const Matrix2 m = [] {
        Matrix2 h;
        h << 1, 1, 1, -1;
        return Matrix2(h / std::sqrt(2.0));
    }();
    return m;
}

const Vector4& BellBasis::operator[](int k) const {
    switch (k) {
        case 0: return phi1;
        case 1: return phi2;
        case 2: return phi3;
        case 3: return phi4;
        default: throw ValidationError("Bell index must be 0..3, got " + std::to_string(k));
    }
}

const BellBasis& bell_basis() {
    static const BellBasis basis = [] {
        const double s = 1.0 / std::sqrt(2.0);
        BellBasis b;
        b.phi1 << s, 0, 0, s;
        b.phi2 << 0, s, s, 0;
        b.phi3 << s, 0, 0, -s;
        b.phi4 << 0, s, -s, 0;
        return b;
    }();
    return basis;
}

TwoQubitState::TwoQubitState(const Matrix4& matrix) : matrix_(matrix) {
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (std::abs(matrix_(r, c) - std::conj(matrix_(c, r))) > kHermitianTol) {
                throw ValidationError("TwoQubitState: matrix is not Hermitian at (" + std::to_string(r) +
                                      ", " + std::to_string(c) + ")");
            }
        }
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
        throw ValidationError("TwoQubitState: trace must be 1, got " + std::to_string(tr.real()));
    }
    const double lowest = min_eigenvalue();
    if (lowest < -kPsdTol) {
        throw ValidationError("TwoQubitState: not positive semidefinite, smallest eigenvalue " +
                              std::to_string(lowest));
    }
}

TwoQubitState TwoQubitState::projector(const Vector4& psi) {
    const Eigen::Vector4cd v = psi.cast<Complex>();
    return TwoQubitState(Matrix4(v * v.adjoint()));
}

double TwoQubitState::expectation(const Vector4& psi) const {
    const Eigen::Vector4cd v = psi.cast<Complex>();
    return (v.adjoint() * matrix_ * v)(0, 0).real();
}

double TwoQubitState::min_eigenvalue() const {
    // Symmetrize so round-off asymmetry below the Hermitian tolerance cannot
    // leak into the solver.
    const Matrix4 herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

TwoQubitState mix(const TwoQubitState& a, const TwoQubitState& b, double alpha) {
    require_probability(alpha, "mix: alpha");
    return TwoQubitState(Matrix4(alpha * a.matrix() + (1.0 - alpha) * b.matrix()));
}

void PauliChannel::validate() const {
    const double qs[4] = {q00, q01, q10, q11};
    const char* names[4] = {"q00", "q01", "q10", "q11"};
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        require_probability(qs[k], std::string("PauliChannel: ") + names[k]);
        sum += qs[k];
    }
    if (std::abs(sum - 1.0) > kChannelSumTol) {
        throw DomainError("PauliChannel: q00 + q01 + q10 + q11 must equal 1", sum);
    }
}

double PauliChannel::weight(int u, int v) const {
    if (u == 0) return v == 0 ? q00 : q01;
    return v == 0 ? q10 : q11;
}

PauliChannel PauliChannel::unit(int u, int v) {
    PauliChannel ch{0.0, 0.0, 0.0, 0.0};
    if (u == 0) {
        (v == 0 ? ch.q00 : ch.q01) = 1.0;
    } else {
        (v == 0 ? ch.q10 : ch.q11) = 1.0;
    }
    return ch;
}

Matrix2 pauli_operator(int u, int v) {
    Matrix2 op = identity2();
    if (u) op = op * pauli_x();
    if (v) op = op * pauli_z();
    return op;
}

TwoQubitState build_source_state(double p0) {
    require_probability(p0, "build_source_state: p0");
    // Outer product written entrywise: sqrt(p0)·sqrt(1−p0) would carry an
    // extra rounding at p0 = 1/2.
    const double c = std::sqrt(p0 * (1.0 - p0));
    Matrix4 rho = Matrix4::Zero();
    rho(0, 0) = p0;
    rho(0, 3) = rho(3, 0) = c;
    rho(3, 3) = 1.0 - p0;
    return TwoQubitState(rho);
}

TwoQubitState apply_channel(const TwoQubitState& source, const PauliChannel& channel, double p_z) {
    channel.validate();
    require_probability(p_z, "apply_channel: p_z");

    const Matrix4& rho = source.matrix();
    Matrix4 out = Matrix4::Zero();
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const double q = channel.weight(u, v);
            if (q == 0.0) continue;
            const Matrix2 op = pauli_operator(u, v);
            if (p_z > 0.0) out += (q * p_z) * conjugate_second_qubit(rho, op);
            if (p_z < 1.0) {
                // H A H with H = (X + Z)/√2, scaled so the product stays exact.
                const Matrix2 xz = pauli_x() + pauli_z();
                const Matrix2 rotated = 0.5 * (xz * op * xz);
                out += (q * (1.0 - p_z)) * conjugate_second_qubit(rho, rotated);
            }
        }
    }
    return TwoQubitState(out);
}

ErrorRatePair error_rates(const TwoQubitState& state) {
    // ⟨φ|ρ|φ⟩ for the Bell vectors, expanded so no 1/√2 factor is rounded.
    const Matrix4& r = state.matrix();
    const double p2 = 0.5 * (r(1, 1).real() + r(2, 2).real() + 2.0 * r(1, 2).real());
    const double p3 = 0.5 * (r(0, 0).real() + r(3, 3).real() - 2.0 * r(0, 3).real());
    const double p4 = 0.5 * (r(1, 1).real() + r(2, 2).real() - 2.0 * r(1, 2).real());
    return {p2 + p4, p3 + p4};
}

}  // namespace weakrand
