#include "covsteer/conic_program.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace covsteer {

int VariableLayout::add(const VarKey& key, int rows, int cols, bool symmetric) {
    if (symmetric && rows != cols)
        throw std::invalid_argument("layout: symmetric slices must be square");
    if (slices_.count(key)) throw std::invalid_argument("layout: duplicate variable " + to_string(key));
    VarSlice slice{total_, rows, cols, symmetric};
    slices_[key] = slice;
    total_ += slice.size();
    return slice.offset;
}

const VarSlice& VariableLayout::slice(const VarKey& key) const {
    auto it = slices_.find(key);
    if (it == slices_.end())
        throw std::logic_error("layout: unknown variable " + to_string(key));
    return it->second;
}

int VariableLayout::scalar_index(const VarKey& key, int row, int col) const {
    const VarSlice& s = slice(key);
    if (row < 0 || row >= s.rows || col < 0 || col >= s.cols)
        throw std::logic_error("layout: entry out of range for " + to_string(key));
    if (s.symmetric) {
        const int r = std::min(row, col);
        const int c = std::max(row, col);
        return s.offset + c * (c + 1) / 2 + r;
    }
    return s.offset + col * s.rows + row;
}

void VariableLayout::set_value(Eigen::VectorXd& x, const VarKey& key,
                               const Eigen::MatrixXd& value) const {
    const VarSlice& s = slice(key);
    if (value.rows() != s.rows || value.cols() != s.cols)
        throw std::invalid_argument("layout: value shape mismatch for " + to_string(key));
    for (int c = 0; c < s.cols; ++c)
        for (int r = 0; r < s.rows; ++r) {
            if (s.symmetric && r > c) continue;
            x(scalar_index(key, r, c)) = value(r, c);
        }
}

Eigen::MatrixXd VariableLayout::get_value(const Eigen::VectorXd& x, const VarKey& key) const {
    const VarSlice& s = slice(key);
    Eigen::MatrixXd out(s.rows, s.cols);
    for (int c = 0; c < s.cols; ++c)
        for (int r = 0; r < s.rows; ++r) out(r, c) = x(scalar_index(key, r, c));
    return out;
}

void ConicProgram::validate() const {
    if (quadratic.rows() != num_vars() || quadratic.cols() != num_vars())
        throw std::logic_error("program: quadratic term dimension mismatch");
    if (linear.size() != num_vars()) throw std::logic_error("program: linear term dimension mismatch");
    if (constraints.rows() != num_rows() || constraints.cols() != num_vars())
        throw std::logic_error("program: constraint matrix dimension mismatch");
    long cone_rows = 0;
    for (const auto& block : cones) {
        if (block.dim <= 0) throw std::logic_error("program: empty cone block");
        if (block.kind == ConeKind::SecondOrder && block.dim < 1)
            throw std::logic_error("program: SOC block must have dim >= 1");
        if (block.kind == ConeKind::PositiveSemidefinite &&
            block.dim != svec_size(block.matrix_dim))
            throw std::logic_error("program: PSD block dim must be a triangle number");
        cone_rows += block.dim;
    }
    if (cone_rows != num_rows())
        throw std::logic_error("program: cone dims do not sum to the row count");

    const Eigen::SparseMatrix<double> diff =
        Eigen::SparseMatrix<double>(quadratic.transpose()) - quadratic;
    if (diff.coeffs().size() > 0 && diff.coeffs().cwiseAbs().maxCoeff() > 1e-12)
        throw std::logic_error("program: quadratic term must be symmetric");

    std::vector<bool> referenced(num_vars(), false);
    for (int k = 0; k < constraints.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(constraints, k); it; ++it)
            referenced[it.col()] = true;
    for (int k = 0; k < quadratic.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(quadratic, k); it; ++it)
            referenced[it.col()] = true;
    for (int i = 0; i < num_vars(); ++i)
        if (linear(i) != 0.0) referenced[i] = true;
    for (const auto& [key, slice] : layout.slices())
        for (int i = 0; i < slice.size(); ++i)
            if (!referenced[slice.offset + i])
                throw std::logic_error("program: unreferenced variable " + to_string(key));
}

std::string ConicProgram::to_debug_json() const {
    nlohmann::json j;
    j["num_vars"] = num_vars();
    j["num_rows"] = num_rows();
    j["objective_constant"] = constant;
    auto triplets = [](const Eigen::SparseMatrix<double>& m) {
        nlohmann::json arr = nlohmann::json::array();
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                arr.push_back({it.row(), it.col(), it.value()});
        return arr;
    };
    j["quadratic"] = triplets(quadratic);
    j["linear"] = std::vector<double>(linear.data(), linear.data() + linear.size());
    j["constraints"] = triplets(constraints);
    j["rhs"] = std::vector<double>(rhs.data(), rhs.data() + rhs.size());
    j["cones"] = nlohmann::json::array();
    static const char* cone_names[] = {"zero", "nonnegative", "second_order", "psd"};
    for (const auto& block : cones)
        j["cones"].push_back({{"kind", cone_names[static_cast<int>(block.kind)]},
                              {"dim", block.dim},
                              {"matrix_dim", block.matrix_dim}});
    return j.dump();
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd out(svec_size(n));
    const double rt2 = std::sqrt(2.0);
    int k = 0;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) out(k++) = (r == c) ? m(r, c) : rt2 * m(r, c);
    return out;
}

Eigen::MatrixXd svec_inverse(const Eigen::VectorXd& v, int n) {
    Eigen::MatrixXd out(n, n);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) {
            const double value = (r == c) ? v(k) : inv_rt2 * v(k);
            out(r, c) = value;
            out(c, r) = value;
            ++k;
        }
    return out;
}

}  // namespace covsteer
