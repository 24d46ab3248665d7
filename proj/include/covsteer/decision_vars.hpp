#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "covsteer/multi_index.hpp"

namespace covsteer {

// Decision variables of the convexified steering problem.
enum class VarKind {
    Mean,         // mu[x_t prod(a)]           n_x vector
    CovXX,        // Cov(x_t prod(a), x_t prod(b)), canonical a <= b; symmetric storage when a == b
    CovXP,        // Cov(x_t prod(a), prod(b)) n_x vector, b nonempty
    Gain,         // L_k                       n_u x n_x
    Feedforward,  // v_k                       n_u vector
    EpigraphV,    // t >= ||v_k - v_hat_k||    scalar
    EpigraphL,    // t >= ||vec(L_k - L_hat_k)||  scalar
};

struct VarKey {
    VarKind kind = VarKind::Mean;
    int time = 0;
    MultiIndex a;
    MultiIndex b;

    bool operator==(const VarKey&) const = default;
    auto operator<=>(const VarKey&) const = default;
};

std::string to_string(const VarKey& key);

// One symbolic product C * X * D (or C * X^T * D), X a decision variable.
struct AffineTerm {
    Eigen::MatrixXd left;
    VarKey var;
    bool transposed = false;
    Eigen::MatrixXd right;
};

// Matrix-valued expression affine in the decision variables. Products with
// constants stay symbolic (the factors are folded into each term), so building
// the linearized dynamics never expands entrywise; expansion happens once, at
// constraint-matrix emission.
class AffineMatrix {
public:
    AffineMatrix() = default;
    AffineMatrix(int rows, int cols) : constant_(Eigen::MatrixXd::Zero(rows, cols)) {}

    static AffineMatrix constant(Eigen::MatrixXd m);
    static AffineMatrix variable(const VarKey& key, int rows, int cols);

    int rows() const { return static_cast<int>(constant_.rows()); }
    int cols() const { return static_cast<int>(constant_.cols()); }

    AffineMatrix& operator+=(const AffineMatrix& other);
    AffineMatrix& operator-=(const AffineMatrix& other);
    AffineMatrix transpose() const;
    AffineMatrix scaled(double s) const;

    friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
    friend AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }
    // Constant-matrix products from either side.
    friend AffineMatrix operator*(const Eigen::MatrixXd& m, AffineMatrix expr);
    friend AffineMatrix operator*(AffineMatrix expr, const Eigen::MatrixXd& m);

    const Eigen::MatrixXd& constant_part() const { return constant_; }
    const std::vector<AffineTerm>& terms() const { return terms_; }

    Eigen::MatrixXd evaluate(
        const std::function<Eigen::MatrixXd(const VarKey&)>& value_of) const;

private:
    Eigen::MatrixXd constant_;
    std::vector<AffineTerm> terms_;
};

// First-order expansions of products around reference values:
//   lin2(x, y) = x yhat + xhat y - xhat yhat
//   lin3(x, y, z) = x yhat zhat + xhat y zhat + xhat yhat z - 2 xhat yhat zhat
// Value and gradient at the reference match the product's.
AffineMatrix lin2(const AffineMatrix& x, const Eigen::MatrixXd& x_hat, const AffineMatrix& y,
                  const Eigen::MatrixXd& y_hat);
AffineMatrix lin3(const AffineMatrix& x, const Eigen::MatrixXd& x_hat, const AffineMatrix& y,
                  const Eigen::MatrixXd& y_hat, const AffineMatrix& z,
                  const Eigen::MatrixXd& z_hat);

}  // namespace covsteer
