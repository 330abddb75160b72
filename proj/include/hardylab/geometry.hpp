#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hardylab {

using Point = std::vector<double>;

inline constexpr std::size_t kDefaultPointBudget = 1'000'000;
inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 24;

struct Box {
    Point lo, hi;
    double diameter() const;
    bool contains(const double* x, double slack = 0.0) const;
};

struct Ball {
    Point center;
    double radius = 0.0;
};

double distance(const double* a, const double* b, int dim);
double ball_volume(int dim, double radius);

// Finite point set kept in lexicographic order and deduplicated at resolution/2.
class PointSet {
public:
    PointSet() = default;
    PointSet(int dim, std::vector<double> coords, double resolution);

    int dim() const { return dim_; }
    std::size_t size() const { return dim_ ? coords_.size() / dim_ : 0; }
    const double* operator[](std::size_t i) const { return coords_.data() + i * dim_; }
    Point point(std::size_t i) const { return Point((*this)[i], (*this)[i] + dim_); }
    const std::vector<double>& coords() const { return coords_; }
    double resolution() const { return resolution_; }
    const Box& bbox() const { return bbox_; }
    double diameter() const { return bbox_.diameter(); }

    // Indices of points in the closed ball, in lexicographic order.
    std::vector<std::size_t> in_ball(const Ball& b) const;
    std::optional<std::size_t> find(const double* x, double tol) const;

private:
    int dim_ = 0;
    std::vector<double> coords_;
    double resolution_ = 0.0;
    Box bbox_;
};

struct Similarity {
    double ratio = 0.5;
    std::vector<double> rotation;  // row-major dim x dim; empty means identity
    Point translation;
};

struct IFSSpec {
    int dim = 1;
    std::vector<Similarity> maps;

    static IFSSpec middle_thirds();
    void validate() const;
};

PointSet generate_prefractal(const IFSSpec& ifs, int depth, const PointSet& seed,
                             std::size_t point_budget = kDefaultPointBudget);

// Uniform grid; node index runs with axis 0 fastest.
// complement marks Omega^c. truncated marks artificial-boundary nodes where test
// functions vanish but which do not count as complement for the distance.
struct GridDomain {
    Point origin;
    double h = 0.0;
    std::vector<std::int64_t> shape;
    std::vector<std::uint8_t> complement;
    std::vector<std::uint8_t> truncated;
    std::string tag;

    int dim() const { return static_cast<int>(shape.size()); }
    std::size_t node_count() const;
    double cell_measure() const;
    bool is_truncated(std::size_t i) const { return !truncated.empty() && truncated[i]; }
    bool is_interior(std::size_t i) const { return !complement[i] && !is_truncated(i); }
    void unravel(std::size_t i, std::int64_t* idx) const;
    std::size_t ravel(const std::int64_t* idx) const;
    Point coords(std::size_t i) const;
    void coords(std::size_t i, double* out) const;
    std::optional<std::size_t> nearest_node(const double* x) const;
    std::size_t interior_count() const;
    void validate() const;
};

// Box [lo, hi] with spacing h; extents must be multiples of h up to rounding.
GridDomain make_grid(const Point& lo, const Point& hi, double h,
                     std::size_t grid_budget = kDefaultGridBudget);

void rasterize(const PointSet& E, GridDomain& grid);

struct DistanceField {
    std::vector<double> d;
    double h = 0.0;
};

DistanceField distance_transform(const GridDomain& domain);

std::vector<std::size_t> maximal_packing(const PointSet& E, double r, const Ball& window);
std::vector<std::size_t> maximal_packing(const PointSet& E, double r,
                                         const std::vector<std::size_t>& candidates);

// True when every listed point of E lies in some ball.
bool covers(const PointSet& E, const std::vector<std::size_t>& idx, const std::vector<Ball>& balls);

}  // namespace hardylab
