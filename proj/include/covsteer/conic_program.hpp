#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <string>
#include <vector>

#include "covsteer/decision_vars.hpp"

namespace covsteer {

// Named slices of the decision vector. Symmetric matrix variables store the
// upper triangle (column-major, n(n+1)/2 scalars); full matrices and vectors
// are column-major.
struct VarSlice {
    int offset = 0;
    int rows = 0;
    int cols = 0;
    bool symmetric = false;

    int size() const { return symmetric ? rows * (rows + 1) / 2 : rows * cols; }
};

class VariableLayout {
public:
    int add(const VarKey& key, int rows, int cols, bool symmetric);
    bool contains(const VarKey& key) const { return slices_.count(key) > 0; }
    const VarSlice& slice(const VarKey& key) const;
    // Scalar column of entry (row, col); for symmetric slices both (i,j) and
    // (j,i) map to the same scalar.
    int scalar_index(const VarKey& key, int row, int col) const;
    int size() const { return total_; }
    const std::map<VarKey, VarSlice>& slices() const { return slices_; }

    // Write a matrix value into / read it out of a packed decision vector.
    void set_value(Eigen::VectorXd& x, const VarKey& key, const Eigen::MatrixXd& value) const;
    Eigen::MatrixXd get_value(const Eigen::VectorXd& x, const VarKey& key) const;

private:
    std::map<VarKey, VarSlice> slices_;
    int total_ = 0;
};

enum class ConeKind { Zero, Nonnegative, SecondOrder, PositiveSemidefinite };

struct ConeBlock {
    ConeKind kind = ConeKind::Zero;
    int dim = 0;         // rows in the constraint matrix
    int matrix_dim = 0;  // PSD only: side length n with dim = n(n+1)/2
};

// min 1/2 x'Px + q'x + const  s.t.  Ax + s = b, s in K1 x K2 x ... PSD slacks
// use the scaled upper-triangle vectorization (off-diagonals times sqrt 2) so
// inner products are preserved.
struct ConicProgram {
    VariableLayout layout;
    Eigen::SparseMatrix<double> quadratic;  // P, symmetric PSD
    Eigen::VectorXd linear;                 // q
    double constant = 0.0;
    Eigen::SparseMatrix<double> constraints;  // A
    Eigen::VectorXd rhs;                      // b
    std::vector<ConeBlock> cones;
    Eigen::VectorXd var_scale_hint;  // expected magnitude per scalar variable
    std::vector<std::string> row_labels;

    int num_vars() const { return layout.size(); }
    int num_rows() const { return static_cast<int>(rhs.size()); }

    // Structural invariants: cone dims sum to the row count, P symmetric,
    // every variable referenced by a constraint or the objective.
    void validate() const;

    std::string to_debug_json() const;
};

// Length of the scaled vectorization of an n x n symmetric matrix.
inline int svec_size(int n) { return n * (n + 1) / 2; }
// Scaled upper-triangle vectorization and its inverse.
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd svec_inverse(const Eigen::VectorXd& v, int n);

}  // namespace covsteer
