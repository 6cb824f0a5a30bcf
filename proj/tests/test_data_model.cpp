#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "szsc/data_model.hpp"

using Eigen::MatrixXd;

namespace {

szsc::Dataset toy_dataset() {
  szsc::Dataset ds;
  ds.features = MatrixXd::Random(4, 6);
  ds.labels = {0, 0, 1, 1, 2, 2};
  ds.class_attr = MatrixXd::Random(3, 3).cwiseAbs();
  ds.seen_classes = {0, 1};
  ds.unseen_classes = {2};
  return ds;
}

}  // namespace

TEST_CASE("validate: well-formed toy set is ok") {
  CHECK(szsc::validate(toy_dataset()).ok());
}

TEST_CASE("validate: label outside the split names the sample") {
  szsc::Dataset ds = toy_dataset();
  ds.labels[3] = 9;
  const auto rep = szsc::validate(ds);
  REQUIRE(!rep.ok());
  bool found = false;
  for (const auto& v : rep.violations) {
    if (v.find("sample 3") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("validate: non-finite class attribute names the class") {
  szsc::Dataset ds = toy_dataset();
  ds.class_attr(1, 2) = std::numeric_limits<double>::quiet_NaN();
  const auto rep = szsc::validate(ds);
  REQUIRE(!rep.ok());
  bool found = false;
  for (const auto& v : rep.violations) {
    if (v.find("class 2") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("validate: overlapping splits and bad ids are reported") {
  szsc::Dataset ds = toy_dataset();
  ds.unseen_classes.insert(1);
  ds.seen_classes.insert(42);
  const auto rep = szsc::validate(ds);
  CHECK(rep.violations.size() >= 2);
}

TEST_CASE("one_hot: fixtures") {
  {
    const auto h = szsc::one_hot({0, 1, 0}, {0, 1});
    MatrixXd want(2, 3);
    want << 1, 0, 1, 0, 1, 0;
    CHECK(h == want);
  }
  {
    const auto h = szsc::one_hot({7}, {7});
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 1);
    CHECK(h(0, 0) == 1.0);
  }
  {
    const auto h = szsc::one_hot({1, 1}, {0, 1});
    MatrixXd want(2, 2);
    want << 0, 0, 1, 1;
    CHECK(h == want);
  }
  CHECK_THROWS_AS((void)szsc::one_hot({0, 5}, {0, 1}), szsc::InputError);
}

TEST_CASE("one_hot: argmax per column recovers the labels") {
  szsc::Rng rng(11);
  const std::vector<int> order{2, 5, 9, 11};
  for (int round = 0; round < 20; ++round) {
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(order[static_cast<std::size_t>(rng.uniform_int(4))]);
    const auto h = szsc::one_hot(labels, order);
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      CHECK(h.col(j).sum() == 1.0);
      Eigen::Index row;
      h.col(j).maxCoeff(&row);
      CHECK(order[static_cast<std::size_t>(row)] == labels[static_cast<std::size_t>(j)]);
    }
  }
}

TEST_CASE("validate_params: range checks") {
  szsc::HyperParams p;
  CHECK_NOTHROW(szsc::validate_params(p));
  p.lambda = 1.5;
  CHECK_THROWS_AS(szsc::validate_params(p), szsc::InputError);
  p.lambda = 0.5;
  p.k_residual = 0;
  CHECK_THROWS_AS(szsc::validate_params(p), szsc::InputError);
  p.k_residual = 4;
  p.solver.rel_tol = 0.0;
  CHECK_THROWS_AS(szsc::validate_params(p), szsc::InputError);
}

TEST_CASE("training_split: broadcasts class attributes and keeps order") {
  szsc::Dataset ds = toy_dataset();
  ds.sample_attrs.resize(0, 0);
  const auto split = szsc::training_split(ds);
  CHECK(split.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(split.features.cols() == 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(split.sample_attrs.col(j) == ds.class_attr.col(split.labels[static_cast<std::size_t>(j)]));
  }
  CHECK(split.class_attr_seen.col(0) == ds.class_attr.col(0));
  CHECK(split.class_attr_seen.col(1) == ds.class_attr.col(1));
  CHECK(szsc::unseen_sample_indices(ds) == std::vector<long>{4, 5});
}
