#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "cht/errors.hpp"
#include "cht/grid.hpp"
#include "cht/snapshot.hpp"

using namespace cht;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
  return f;
}

}  // namespace

TEST(GridShape, SpacingVolumeAndMeasure) {
  const Grid g = Grid::rectangle(2.0, 0.5, 40, 10);
  EXPECT_EQ(g.dim(), 2);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.05);
  EXPECT_DOUBLE_EQ(g.spacing(1), 0.05);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0025);
  EXPECT_DOUBLE_EQ(g.measure(), 1.0);
  EXPECT_EQ(g.size(), 400u);
  EXPECT_EQ(g.index(3, 2), 83u);
  EXPECT_DOUBLE_EQ(g.center(0, 0), 0.025);
}

TEST(GridShape, LineHasOneRow) {
  const Grid g = Grid::line(3.0, 30);
  EXPECT_EQ(g.dim(), 1);
  EXPECT_EQ(g.cells(1), 1);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.1);
  EXPECT_DOUBLE_EQ(g.measure(), 3.0);
  EXPECT_DOUBLE_EQ(g.h_min(), 0.1);
}

TEST(GridShape, RejectsInvalidShapes) {
  EXPECT_THROW(Grid(3, {1, 1}, {4, 4}), DomainError);
  EXPECT_THROW(Grid::rectangle(0.0, 1.0, 4, 4), DomainError);
  EXPECT_THROW(Grid::rectangle(1.0, 1.0, 0, 4), DomainError);
  EXPECT_THROW(Grid::line(-1.0, 4), DomainError);
}

TEST(FieldBasics, SizeMismatchIsContractViolation) {
  const Grid g = Grid::line(1.0, 4);
  EXPECT_THROW(Field(g, std::vector<double>(5, 0.0)), ContractViolation);
}

TEST(FieldBasics, FiniteCheck) {
  const Grid g = Grid::line(1.0, 4);
  Field f(g, 1.0);
  EXPECT_TRUE(f.all_finite());
  f[2] = INFINITY;
  EXPECT_FALSE(f.all_finite());
  f[2] = std::nan("");
  EXPECT_FALSE(f.all_finite());
}

TEST(Integrate, ConstantTwoOnUnitSquare) {
  for (int n : {1, 7, 64}) EXPECT_NEAR(integrate(Field(Grid::rectangle(1, 1, n, n), 2.0), Grid::rectangle(1, 1, n, n)), 2.0, 1e-14);
}

TEST(Integrate, ZeroField) {
  const Grid g = Grid::rectangle(1, 1, 8, 8);
  EXPECT_EQ(integrate(Field(g), g), 0.0);
}

TEST(Integrate, CosineIntegratesToZero) {
  const Grid g = Grid::line(1.0, 64);
  const Field f = Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  EXPECT_NEAR(integrate(f, g), 0.0, 1e-12);
}

TEST(Integrate, MismatchedGridIsContractViolation) {
  const Grid a = Grid::line(1.0, 8), b = Grid::line(1.0, 9);
  EXPECT_THROW(integrate(Field(a), b), ContractViolation);
}

TEST(Integrate, Linear) {
  const Grid g = Grid::rectangle(1.3, 0.7, 13, 9);
  const Field f = random_field(g, 1), h = random_field(g, 2);
  Field combo(g);
  for (std::size_t k = 0; k < combo.size(); ++k) combo[k] = 2.5 * f[k] - 0.75 * h[k];
  EXPECT_NEAR(integrate(combo, g), 2.5 * integrate(f, g) - 0.75 * integrate(h, g), 1e-14);
}

TEST(LpNorm, ConstantThreeSquared) {
  const Grid g = Grid::rectangle(1, 1, 16, 16);
  EXPECT_NEAR(lp_norm(Field(g, 3.0), 2.0, g), 3.0, 1e-14);
}

TEST(LpNorm, ZeroFieldAnyExponent) {
  const Grid g = Grid::rectangle(1, 1, 8, 8);
  for (double p : {1.0, 1.5, 2.0, 7.0}) EXPECT_EQ(lp_norm(Field(g), p, g), 0.0);
}

TEST(LpNorm, IdentityOnUnitInterval) {
  const Grid g = Grid::line(1.0, 128);
  const Field f = Field::from_function(g, [](double x, double) { return x; });
  EXPECT_NEAR(lp_norm(f, 1.0, g), 0.5, 1e-6);
}

TEST(LpNorm, RejectsExponentBelowOne) {
  const Grid g = Grid::line(1.0, 4);
  EXPECT_THROW(lp_norm(Field(g, 1.0), 0.5, g), DomainError);
}

TEST(LpNorm, BoundedBySupNorm) {
  const Grid g = Grid::rectangle(2.0, 1.5, 12, 10);
  const Field f = random_field(g, 3);
  for (double p : {1.0, 1.5, 2.0, 3.0, 8.0})
    EXPECT_LE(lp_norm(f, p, g), std::pow(g.measure(), 1.0 / p) * linf_norm(f) * (1 + 1e-14));
}

TEST(LpNorm, MonotoneInExponentOnUnitMeasure) {
  const Grid g = Grid::rectangle(1, 1, 20, 20);
  const Field f = random_field(g, 4, 0.0, 3.0);
  double previous = 0.0;
  for (double p = 1.0; p <= 10.0; p += 0.25) {
    const double value = lp_norm(f, p, g);
    EXPECT_GE(value, previous * (1 - 1e-14));
    previous = value;
  }
}

TEST(LinfNorm, Examples) {
  const Grid g = Grid::rectangle(1, 1, 5, 5);
  EXPECT_EQ(linf_norm(Field(g, -4.0)), 4.0);
  EXPECT_EQ(linf_norm(Field(g)), 0.0);
  Field spike(g);
  spike(2, 3) = 7.0;
  EXPECT_EQ(linf_norm(spike), 7.0);
}

TEST(PairwiseSum, MatchesExactSmallSums) {
  std::vector<double> v(1000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Snapshot, CsvRoundTripIsExact) {
  const Grid g = Grid::rectangle(1.5, 0.5, 6, 4);
  const Snapshot snap{"u", 0.30000000000000004, random_field(g, 5)};
  std::stringstream io;
  write_snapshot_csv(io, snap);
  const Snapshot back = read_snapshot_csv(io);
  EXPECT_EQ(back.name, "u");
  EXPECT_EQ(back.t, snap.t);
  EXPECT_EQ(back.field, snap.field);
}

TEST(Snapshot, CsvHeaderLayout) {
  const Grid g = Grid::rectangle(1, 1, 2, 2);
  std::stringstream io;
  write_snapshot_csv(io, Snapshot{"w", 0.5, Field(g, 1.0)});
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header, "# dim=2 extents=1,1 cells=2,2 field=w t=0.5");
  std::string row;
  std::getline(io, row);
  EXPECT_EQ(row, "1,1");
}

TEST(Snapshot, BinaryRoundTripIsExact) {
  for (const Grid& g : {Grid::line(2.0, 9), Grid::rectangle(1, 2, 3, 5)}) {
    const Snapshot snap{"v", 1.25, random_field(g, 6)};
    std::stringstream io;
    write_snapshot_binary(io, snap);
    const std::string bytes = io.str();
    EXPECT_EQ(bytes.substr(0, 8), "CHTSNAP1");
    EXPECT_EQ(bytes.size(), 48 + 1 + 8 * g.size());
    const Snapshot back = read_snapshot_binary(io);
    EXPECT_EQ(back.name, "v");
    EXPECT_EQ(back.t, 1.25);
    EXPECT_EQ(back.field, snap.field);
  }
}

TEST(Snapshot, RejectsCorruptInput) {
  std::stringstream bad_csv("not a header\n1,2\n");
  EXPECT_ANY_THROW(read_snapshot_csv(bad_csv));
  std::stringstream bad_bin("CHTSNAP0xxxxxxxx");
  EXPECT_ANY_THROW(read_snapshot_binary(bad_bin));
}

TEST(Snapshot, SaveNamesFileByIndex) {
  const auto dir = std::filesystem::temp_directory_path() / "cht_snapshot_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = save_snapshot_csv(dir, Snapshot{"u", 0.0, Field(Grid::line(1, 3), 2.0)}, 12);
  EXPECT_EQ(path.filename(), "u_000012.csv");
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove_all(dir);
}
