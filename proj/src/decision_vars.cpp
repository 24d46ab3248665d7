#include "covsteer/decision_vars.hpp"

#include <sstream>
#include <stdexcept>

namespace covsteer {

std::string to_string(const VarKey& key) {
    static const char* names[] = {"mean", "cov_xx", "cov_xp", "gain", "feedforward",
                                  "epigraph_v", "epigraph_l"};
    std::ostringstream out;
    out << names[static_cast<int>(key.kind)] << "[t=" << key.time;
    const auto dump = [&out](const char* tag, const MultiIndex& mi) {
        out << ", " << tag << "=(";
        for (std::size_t i = 0; i < mi.indices().size(); ++i)
            out << (i ? "," : "") << mi.indices()[i];
        out << ")";
    };
    if (key.kind == VarKind::Mean || key.kind == VarKind::CovXX || key.kind == VarKind::CovXP)
        dump("a", key.a);
    if (key.kind == VarKind::CovXX || key.kind == VarKind::CovXP) dump("b", key.b);
    out << "]";
    return out.str();
}

AffineMatrix AffineMatrix::constant(Eigen::MatrixXd m) {
    AffineMatrix out;
    out.constant_ = std::move(m);
    return out;
}

AffineMatrix AffineMatrix::variable(const VarKey& key, int rows, int cols) {
    AffineMatrix out(rows, cols);
    out.terms_.push_back({Eigen::MatrixXd::Identity(rows, rows), key, false,
                          Eigen::MatrixXd::Identity(cols, cols)});
    return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
    if (rows() != other.rows() || cols() != other.cols())
        throw std::invalid_argument("affine expression: shape mismatch in +=");
    constant_ += other.constant_;
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& other) {
    return *this += other.scaled(-1.0);
}

AffineMatrix AffineMatrix::transpose() const {
    AffineMatrix out;
    out.constant_ = constant_.transpose();
    for (const auto& term : terms_)
        out.terms_.push_back(
            {term.right.transpose(), term.var, !term.transposed, term.left.transpose()});
    return out;
}

AffineMatrix AffineMatrix::scaled(double s) const {
    AffineMatrix out = *this;
    out.constant_ *= s;
    for (auto& term : out.terms_) term.left *= s;
    return out;
}

AffineMatrix operator*(const Eigen::MatrixXd& m, AffineMatrix expr) {
    if (m.cols() != expr.rows())
        throw std::invalid_argument("affine expression: shape mismatch in left product");
    expr.constant_ = (m * expr.constant_).eval();
    for (auto& term : expr.terms_) term.left = (m * term.left).eval();
    return expr;
}

AffineMatrix operator*(AffineMatrix expr, const Eigen::MatrixXd& m) {
    if (expr.cols() != m.rows())
        throw std::invalid_argument("affine expression: shape mismatch in right product");
    expr.constant_ = (expr.constant_ * m).eval();
    for (auto& term : expr.terms_) term.right = (term.right * m).eval();
    return expr;
}

Eigen::MatrixXd AffineMatrix::evaluate(
    const std::function<Eigen::MatrixXd(const VarKey&)>& value_of) const {
    Eigen::MatrixXd out = constant_;
    for (const auto& term : terms_) {
        Eigen::MatrixXd value = value_of(term.var);
        if (term.transposed) value.transposeInPlace();
        out += term.left * value * term.right;
    }
    return out;
}

AffineMatrix lin2(const AffineMatrix& x, const Eigen::MatrixXd& x_hat, const AffineMatrix& y,
                  const Eigen::MatrixXd& y_hat) {
    AffineMatrix out = x * y_hat;
    out += x_hat * y;
    out += AffineMatrix::constant(-(x_hat * y_hat));
    return out;
}

AffineMatrix lin3(const AffineMatrix& x, const Eigen::MatrixXd& x_hat, const AffineMatrix& y,
                  const Eigen::MatrixXd& y_hat, const AffineMatrix& z,
                  const Eigen::MatrixXd& z_hat) {
    AffineMatrix out = x * (y_hat * z_hat);
    out += x_hat * (y * z_hat);
    out += (x_hat * y_hat) * z;
    out += AffineMatrix::constant(-2.0 * (x_hat * y_hat * z_hat));
    return out;
}

}  // namespace covsteer
