#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "lmdl/dataset.hpp"

using namespace lmdl;

TEST_CASE("load_csv expands categorical columns one-hot in first-appearance order") {
  testutil::TempFile csv("color,size,cls\nred,1.0,a\nblue,2.0,b\nred,3.0,a\n");
  Dataset ds = load_csv(csv.path(), "cls", {"color"});
  CHECK(ds.dim() == 3);  // 2 one-hot + 1 numeric
  CHECK(ds.size() == 3);
  CHECK(ds.features(0, 0) == 1.0);
  CHECK(ds.features(1, 0) == 0.0);
  CHECK(ds.features(0, 1) == 0.0);
  CHECK(ds.features(1, 1) == 1.0);
  CHECK(ds.features(0, 2) == 1.0);
  CHECK(ds.feature_names[0] == "color=red");
  CHECK(ds.feature_names[1] == "color=blue");
  CHECK(ds.labels == std::vector<int>{1, 2, 1});
}

TEST_CASE("load_csv resolves the label column by zero-based index") {
  testutil::TempFile csv("a,b\n1,x\n2,y\n3,x\n");
  Dataset ds = load_csv(csv.path(), "1");
  CHECK(ds.dim() == 1);
  CHECK(ds.class_count == 2);
}

TEST_CASE("load_csv rejects malformed input") {
  CHECK_THROWS(load_csv("/nonexistent/path.csv", "label"));

  testutil::TempFile ragged("a,b,cls\n1,2,x\n1,x\n2,3,y\n");
  CHECK_THROWS(load_csv(ragged.path(), "cls"));

  testutil::TempFile non_numeric("a,cls\nabc,x\n2,y\n");
  CHECK_THROWS(load_csv(non_numeric.path(), "cls"));

  testutil::TempFile single_class("a,cls\n1,x\n2,x\n");
  CHECK_THROWS(load_csv(single_class.path(), "cls"));

  testutil::TempFile missing_col("a,cls\n1,x\n2,y\n");
  CHECK_THROWS(load_csv(missing_col.path(), "nope"));

  testutil::TempFile non_finite("a,cls\nnan,x\n2,y\n");
  CHECK_THROWS(load_csv(non_finite.path(), "cls"));

  testutil::TempFile empty_cell("a,cls\n,x\n2,y\n");
  CHECK_THROWS(load_csv(empty_cell.path(), "cls"));
}

TEST_CASE("one-hot groups sum to exactly 1 per row") {
  testutil::TempFile csv(
      "c1,v,c2,cls\nred,1,s,a\nblue,2,m,b\ngreen,3,l,a\nred,4,m,b\nblue,5,s,a\n");
  Dataset ds = load_csv(csv.path(), "cls", {"c1", "c2"});
  // c1 expands to 3 features, c2 to 3; layout: c1 group, v, c2 group.
  for (int j = 0; j < ds.size(); ++j) {
    CHECK(ds.features.col(j).segment(0, 3).sum() == 1.0);
    CHECK(ds.features.col(j).segment(4, 3).sum() == 1.0);
  }
}

TEST_CASE("standardize uses the sample convention and zeroes constant features") {
  Dataset ds;
  ds.features.resize(2, 2);
  ds.features << 1.0, 3.0, 5.0, 5.0;
  ds.labels = {1, 2};
  ds.class_count = 2;
  auto [out, rec] = standardize(ds);
  CHECK(out.features(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(out.features(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rec.mean[0] == doctest::Approx(2.0));
  CHECK(rec.std[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(out.features(1, 0) == 0.0);
  CHECK(out.features(1, 1) == 0.0);
  CHECK(rec.std[1] == 0.0);
}

TEST_CASE("standardize is idempotent and the record reproduces its output") {
  std::mt19937_64 rng(5);
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 60, 1.0, 17);
  auto [once, rec] = standardize(ds);
  auto [twice, rec2] = standardize(once);
  CHECK((twice.features - once.features).cwiseAbs().maxCoeff() <= 1e-12);

  // Applying the stored record to the original data reproduces the output.
  Dataset replayed = rec.apply(ds);
  CHECK((replayed.features - once.features).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("make_folds stratifies exactly on balanced input") {
  Dataset ds;
  ds.features = Eigen::MatrixXd::Random(2, 10);
  ds.labels = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  ds.class_count = 2;
  auto plans = make_folds(ds, 5, 1, 9);
  REQUIRE(plans.size() == 1);
  for (int f = 0; f < 5; ++f) {
    auto test = plans[0].test_indices(f);
    REQUIRE(test.size() == 2);
    CHECK(ds.labels[test[0]] + ds.labels[test[1]] == 3);  // one of each class
  }
}

TEST_CASE("make_folds is deterministic and covers every point exactly once") {
  Dataset ds = generate_synthetic(SyntheticKind::concentric_circles, 46, 0.1, 3);
  auto a = make_folds(ds, 4, 3, 1234);
  auto b = make_folds(ds, 4, 3, 1234);
  REQUIRE(a.size() == 3);
  for (int r = 0; r < 3; ++r) CHECK(a[r].fold_assignments == b[r].fold_assignments);

  for (const auto& plan : a) {
    std::vector<int> seen(ds.size(), 0);
    std::vector<int> sizes(plan.fold_count, 0);
    for (int f = 0; f < plan.fold_count; ++f)
      for (int i : plan.test_indices(f)) {
        ++seen[i];
        ++sizes[f];
      }
    for (int c : seen) CHECK(c == 1);
    int lo = *std::min_element(sizes.begin(), sizes.end());
    int hi = *std::max_element(sizes.begin(), sizes.end());
    CHECK(hi - lo <= 1);
    // per-class counts per fold differ by at most 1
    for (int k = 1; k <= ds.class_count; ++k) {
      std::vector<int> per_fold(plan.fold_count, 0);
      for (int i = 0; i < ds.size(); ++i)
        if (ds.labels[i] == k) ++per_fold[plan.fold_assignments[i]];
      int plo = *std::min_element(per_fold.begin(), per_fold.end());
      int phi = *std::max_element(per_fold.begin(), per_fold.end());
      CHECK(phi - plo <= 1);
    }
  }
}

TEST_CASE("make_folds rejects classes smaller than the fold count") {
  Dataset ds;
  ds.features = Eigen::MatrixXd::Random(2, 13);
  ds.labels = {1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2};
  ds.class_count = 2;
  CHECK_THROWS(make_folds(ds, 10, 1, 0));
}

TEST_CASE("concentric circles without noise sit on radii 1 and 2") {
  Dataset ds = generate_synthetic(SyntheticKind::concentric_circles, 200, 0.0, 7);
  CHECK(ds.size() == 200);
  CHECK(ds.class_count == 2);
  for (int j = 0; j < ds.size(); ++j) {
    double r = ds.features.col(j).norm();
    CHECK(r == doctest::Approx(ds.labels[j] == 1 ? 1.0 : 2.0).epsilon(1e-12));
  }
}

TEST_CASE("two gaussians with identical centers and zero noise coincide") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 8, 0.0, 1, 0.0);
  for (int j = 0; j < ds.size(); ++j) CHECK(ds.features.col(j).norm() == 0.0);
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  Dataset a = generate_synthetic(SyntheticKind::helix, 100, 0.05, 99);
  Dataset b = generate_synthetic(SyntheticKind::helix, 100, 0.05, 99);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.dim() == 3);
  CHECK(a.class_count == 5);
}

TEST_CASE("unknown synthetic kind is rejected") {
  CHECK_THROWS(parse_synthetic_kind("spiral"));
}

TEST_CASE("save_csv round-trips through load_csv") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 20, 1.0, 5);
  testutil::TempFile slot("", "roundtrip.csv");
  save_csv(ds, slot.path());
  Dataset back = load_csv(slot.path(), "label");
  CHECK(back.size() == ds.size());
  CHECK(back.dim() == ds.dim());
  CHECK((back.features - ds.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.labels == ds.labels);
}
