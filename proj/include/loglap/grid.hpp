#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loglap/errors.hpp"

namespace loglap {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Point = PointT<double>;
using MultiIndex = Eigen::VectorXi;

// Box-truncated uniform lattice. Linear node order is row-major: the last
// coordinate varies fastest.
template <typename Scalar = double>
class BasicGrid {
public:
    BasicGrid() = default;

    BasicGrid(PointT<Scalar> origin, Scalar h, MultiIndex dims)
        : origin_(std::move(origin)), h_(h), dims_(std::move(dims)) {
        if (origin_.size() != dims_.size() || origin_.size() < 1)
            throw PreconditionError("grid: origin and dims must have the same positive length");
        if (!(h_ > Scalar(0))) throw PreconditionError("grid: spacing h must be positive");
        if ((dims_.array() < 1).any()) throw PreconditionError("grid: dims must be >= 1");
        strides_.resize(dims_.size());
        Eigen::Index s = 1;
        for (Eigen::Index d = dims_.size() - 1; d >= 0; --d) {
            strides_[d] = s;
            s *= dims_[d];
        }
        size_ = s;
    }

    // Square box [-radius, radius]^n with nodes on multiples of h.
    static BasicGrid centered(int n, Scalar h, Scalar radius) {
        const int half = static_cast<int>(std::llround(radius / h));
        return BasicGrid(PointT<Scalar>::Constant(n, -half * h), h,
                         MultiIndex::Constant(n, 2 * half + 1));
    }

    int dim() const { return static_cast<int>(dims_.size()); }
    Scalar h() const { return h_; }
    const PointT<Scalar>& origin() const { return origin_; }
    const MultiIndex& dims() const { return dims_; }
    Eigen::Index size() const { return size_; }

    Scalar lower(int d) const { return origin_[d]; }
    Scalar upper(int d) const { return origin_[d] + h_ * Scalar(dims_[d] - 1); }

    MultiIndex multi_index(Eigen::Index linear) const {
        MultiIndex k(dims_.size());
        for (Eigen::Index d = 0; d < dims_.size(); ++d) {
            k[d] = static_cast<int>(linear / strides_[d]);
            linear -= k[d] * strides_[d];
        }
        return k;
    }

    Eigen::Index linear_index(const MultiIndex& k) const {
        Eigen::Index idx = 0;
        for (Eigen::Index d = 0; d < dims_.size(); ++d) idx += k[d] * strides_[d];
        return idx;
    }

    bool contains(const MultiIndex& k) const {
        return (k.array() >= 0).all() && (k.array() < dims_.array()).all();
    }

    PointT<Scalar> coord(const MultiIndex& k) const {
        return origin_ + h_ * k.template cast<Scalar>();
    }
    PointT<Scalar> coord(Eigen::Index linear) const { return coord(multi_index(linear)); }

    // Node whose coordinates equal x up to tol*h, if any.
    std::optional<Eigen::Index> node_at(const PointT<Scalar>& x, Scalar tol = Scalar(1e-9)) const {
        if (x.size() != dims_.size()) return std::nullopt;
        MultiIndex k(dims_.size());
        for (Eigen::Index d = 0; d < dims_.size(); ++d) {
            const Scalar r = (x[d] - origin_[d]) / h_;
            const Scalar nearest = std::round(r);
            if (std::abs(r - nearest) > tol) return std::nullopt;
            k[d] = static_cast<int>(nearest);
        }
        if (!contains(k)) return std::nullopt;
        return linear_index(k);
    }

    // True when the closed ball B_r(center) lies strictly inside the box.
    bool contains_ball(const PointT<Scalar>& center, Scalar r) const {
        for (int d = 0; d < dim(); ++d)
            if (center[d] - r <= lower(d) || center[d] + r >= upper(d)) return false;
        return true;
    }

    bool operator==(const BasicGrid& o) const {
        return dims_ == o.dims_ && h_ == o.h_ && origin_ == o.origin_;
    }

private:
    PointT<Scalar> origin_;
    Scalar h_ = 0;
    MultiIndex dims_;
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> strides_;
    Eigen::Index size_ = 0;
};

using UniformGrid = BasicGrid<double>;

// Node values on a grid; the function is zero outside the grid box.
template <typename Scalar = double>
struct BasicGridFunction {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicGrid<Scalar> grid;
    Vector values;

    BasicGridFunction() = default;
    explicit BasicGridFunction(BasicGrid<Scalar> g)
        : grid(std::move(g)), values(Vector::Zero(grid.size())) {}
    BasicGridFunction(BasicGrid<Scalar> g, Vector v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size())
            throw ContractError("grid function: value count does not match grid size");
    }

    static BasicGridFunction sample(const BasicGrid<Scalar>& g,
                                    const std::function<Scalar(const PointT<Scalar>&)>& f) {
        BasicGridFunction u(g);
        for (Eigen::Index i = 0; i < g.size(); ++i) u.values[i] = f(g.coord(i));
        return u;
    }

    Scalar operator[](Eigen::Index i) const { return values[i]; }
    Scalar& operator[](Eigen::Index i) { return values[i]; }

    // Zero extension outside the box.
    Scalar at(const MultiIndex& k) const {
        return grid.contains(k) ? values[grid.linear_index(k)] : Scalar(0);
    }

    Scalar sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : Scalar(0); }
};

using GridFunction = BasicGridFunction<double>;

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string join_numbers(const Eigen::Ref<const Eigen::VectorXd>& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_number(v[i]);
    }
    return s;
}

inline Eigen::VectorXd parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        try {
            out.push_back(std::stod(item, &pos));
        } catch (const std::exception&) {
            throw ConfigError("expected a comma-separated number list, got '" + text + "'");
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size()) throw ConfigError("trailing characters in number list '" + text + "'");
    }
    if (out.empty()) throw ConfigError("empty number list");
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// Text format: header "# n=<n> h=<h> origin=<a,b> dims=<p,q>", then one
// "x1,...,xn,value" line per node in row-major order.
inline void write_grid_function(std::ostream& os, const GridFunction& u) {
    const auto& g = u.grid;
    os << "# n=" << g.dim() << " h=" << format_number(g.h())
       << " origin=" << join_numbers(g.origin()) << " dims=";
    for (int d = 0; d < g.dim(); ++d) os << (d ? "," : "") << g.dims()[d];
    os << '\n';
    for (Eigen::Index i = 0; i < g.size(); ++i)
        os << join_numbers(g.coord(i)) << ',' << format_number(u.values[i]) << '\n';
}

inline void write_grid_function(const std::string& path, const GridFunction& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    write_grid_function(os, u);
}

inline GridFunction read_grid_function(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("#", 0) != 0)
        throw ConfigError("grid function: missing '#' header line");
    int n = -1;
    double h = 0;
    Eigen::VectorXd origin, dims;
    std::stringstream hs(header.substr(1));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("grid function: bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "n") n = std::stoi(val);
        else if (key == "h") h = std::stod(val);
        else if (key == "origin") origin = parse_number_list(val);
        else if (key == "dims") dims = parse_number_list(val);
        else throw ConfigError("grid function: unknown header key '" + key + "'");
    }
    if (n < 1 || origin.size() != n || dims.size() != n)
        throw ConfigError("grid function: inconsistent header");
    UniformGrid grid(origin, h, dims.cast<int>());
    GridFunction u(grid);
    std::string line;
    Eigen::Index i = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (i >= grid.size()) throw ConfigError("grid function: too many data lines");
        const Eigen::VectorXd row = parse_number_list(line);
        if (row.size() != n + 1) throw ConfigError("grid function: wrong column count on data line");
        u.values[i++] = row[n];
    }
    if (i != grid.size()) throw ConfigError("grid function: too few data lines");
    return u;
}

inline GridFunction read_grid_function(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    return read_grid_function(is);
}

} // namespace loglap
