#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "s2cn/data/dataset.hpp"
#include "s2cn/data/key_value.hpp"
#include "s2cn/data/synthetic.hpp"
#include "s2cn/data/tensor_file.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace s2cn;

TEST_CASE("tensor file layout is bit-exact") {
  const Tensor t({2}, {1.0, -2.0});
  std::ostringstream os(std::ios::binary);
  write_tensor(os, t);
  const std::string b = os.str();
  REQUIRE(b.size() == 4 + 4 + 1 + 4 + 8 + 16);
  CHECK(b.substr(0, 4) == "STSR");
  CHECK(static_cast<unsigned char>(b[4]) == 1);
  CHECK(b[5] == 0);
  CHECK(b[8] == 0);
  CHECK(static_cast<unsigned char>(b[9]) == 1);
  CHECK(static_cast<unsigned char>(b[13]) == 2);
  // 1.0 is 0x3FF0000000000000 little-endian
  CHECK(static_cast<unsigned char>(b[21 + 7]) == 0x3F);
  CHECK(static_cast<unsigned char>(b[21 + 6]) == 0xF0);
}

TEST_CASE("tensor file round trip") {
  const auto dir = th::scratch_dir("tensor_file");
  RngStream rng(1);
  const Tensor t = th::random_tensor({3, 4, 5}, rng);
  save_tensor(dir / "t.stsr", t);
  CHECK(bitwise_equal(load_tensor(dir / "t.stsr"), t));
  const Tensor empty({0, 3});
  save_tensor(dir / "e.stsr", empty);
  CHECK(bitwise_equal(load_tensor(dir / "e.stsr"), empty));
}

TEST_CASE("tensor file rejects corrupt input") {
  std::ostringstream os(std::ios::binary);
  write_tensor(os, Tensor({2, 2}, 1.0));
  const std::string good = os.str();
  {
    std::string bad = good;
    bad[0] = 'X';
    std::istringstream is(bad);
    CHECK_THROWS_AS(read_tensor(is), FormatError);
  }
  {
    std::istringstream is(good.substr(0, good.size() - 3));
    CHECK_THROWS_WITH_AS(read_tensor(is), doctest::Contains("truncated"), FormatError);
  }
  {
    std::string bad = good;
    bad[8] = 7;
    std::istringstream is(bad);
    CHECK_THROWS_WITH_AS(read_tensor(is), doctest::Contains("dtype"), FormatError);
  }
  {
    std::istringstream is(good + "x");
    CHECK_THROWS_AS(read_tensor(is), FormatError);
  }
}

TEST_CASE("key-value parsing") {
  std::istringstream is("# comment\nname = faces\n\n n=3\nname=later\n");
  const KeyValues kv = parse_key_values(is);
  CHECK(lookup(kv, "name") == "later");
  CHECK(lookup(kv, "n") == "3");
  CHECK_FALSE(lookup(kv, "missing"));
  std::istringstream bad("no equals sign\n");
  CHECK_THROWS(parse_key_values(bad));
}

TEST_CASE("label csv") {
  std::istringstream is("index,label\n0,2\n1,1\n2,2\n");
  CHECK(parse_labels_csv(is) == std::vector<Label>{2, 1, 2});
  std::istringstream gap("index,label\n0,2\n2,1\n");
  CHECK_THROWS_AS(parse_labels_csv(gap), FormatError);
  std::ostringstream os;
  write_labels_csv(os, {3, 1});
  CHECK(os.str() == "index,label\n0,3\n1,1\n");
}

namespace {

ImageDataset small_dataset() {
  ImageDataset ds;
  ds.name = "tiny";
  ds.clusters = 3;
  ds.images = Tensor({6, 2, 2}, 0.25);
  ds.labels = {1, 2, 3, 1, 2, 3};
  return ds;
}

}  // namespace

TEST_CASE("dataset write and load round trip") {
  const auto dir = th::scratch_dir("dataset");
  ImageDataset ds = small_dataset();
  ds.features = Tensor({3, 6}, 0.5);
  ds.resampler = "area";
  const auto manifest = write_dataset(dir, ds);
  const ImageDataset back = load_dataset(manifest);
  CHECK(back.name == "tiny");
  CHECK(back.clusters == 3);
  CHECK(back.labels == ds.labels);
  CHECK(bitwise_equal(back.images, ds.images));
  CHECK(bitwise_equal(back.features, ds.features));
  CHECK(back.resampler == "area");
}

TEST_CASE("dataset loading rescales 0-255 pixels and rejects bad ones") {
  const auto dir = th::scratch_dir("dataset_scale");
  save_tensor(dir / "img.stsr", Tensor({2, 1, 2}, {0.0, 255.0, 51.0, 102.0}));
  {
    std::ofstream m(dir / "m.txt");
    m << "name=raw\nn=2\ntensor=img.stsr\n";
  }
  const ImageDataset ds = load_dataset(dir / "m.txt");
  CHECK(ds.images[1] == 1.0);
  CHECK(ds.images[2] == doctest::Approx(0.2));
  save_tensor(dir / "neg.stsr", Tensor({2, 1, 2}, {0.0, -1.0, 0.5, 0.5}));
  {
    std::ofstream m(dir / "neg.txt");
    m << "name=raw\nn=2\ntensor=neg.stsr\n";
  }
  CHECK_THROWS_AS(load_dataset(dir / "neg.txt"), std::invalid_argument);
  CHECK_THROWS_WITH(load_dataset(dir / "absent.txt"), doctest::Contains("absent.txt"));
}

TEST_CASE("dataset invariants") {
  ImageDataset ds = small_dataset();
  CHECK_NOTHROW(validate_dataset(ds));
  ds.labels.pop_back();
  CHECK_THROWS_AS(validate_dataset(ds), std::invalid_argument);
  ds = small_dataset();
  ds.labels[0] = 4;
  CHECK_THROWS_AS(validate_dataset(ds), std::invalid_argument);
  ds = small_dataset();
  ds.clusters = 1;
  CHECK_THROWS_AS(validate_dataset(ds), std::invalid_argument);
}

TEST_CASE("subject subsets keep the first classes in order") {
  const ImageDataset ds = small_dataset();
  const ImageDataset sub = subset_subjects(ds, 2);
  CHECK(sub.labels == std::vector<Label>{1, 2, 1, 2});
  CHECK(sub.images.extent(0) == 4);
  CHECK(sub.clusters == 2);
  CHECK_THROWS_AS(subset_subjects(ds, 4), std::invalid_argument);
}

TEST_CASE("synthetic points lie in their subspaces") {
  SyntheticSpec spec;
  spec.seed = 3;
  const SyntheticSet set = gen_synthetic(spec);
  REQUIRE(set.points.shape() == Shape{30, 200});
  for (std::size_t j = 0; j < 200; ++j) {
    const Tensor& basis = set.bases[static_cast<std::size_t>(set.labels[j] - 1)];
    Tensor x({30, 1});
    for (std::size_t i = 0; i < 30; ++i) x[i] = set.points(i, j);
    const Tensor proj = oracle::naive_matmul(basis, oracle::naive_matmul(transpose(basis), x));
    CHECK(th::max_abs_diff(proj, x) < 1e-12);
  }
  const Tensor gram = oracle::naive_matmul(transpose(set.bases[0]), set.bases[0]);
  CHECK(th::max_abs_diff(gram, Tensor::identity(3)) < 1e-12);
  SyntheticSpec again = spec;
  CHECK(bitwise_equal(gen_synthetic(again).points, set.points));
  spec.dim = 30;
  CHECK_THROWS_AS(gen_synthetic(spec), std::invalid_argument);
}

TEST_CASE("noiseless synthetic data admits an exact within-subspace self-expression") {
  // Least squares of one point on the other points of its subspace.
  SyntheticSpec spec;
  spec.subspaces = 2;
  spec.per_subspace = 6;
  spec.ambient = 8;
  spec.seed = 4;
  const SyntheticSet set = gen_synthetic(spec);
  Tensor others({8, 5});
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t i = 0; i < 8; ++i) others(i, c) = set.points(i, c + 1);
  Tensor target({8, 1});
  for (std::size_t i = 0; i < 8; ++i) target[i] = set.points(i, 0);
  // normal equations on the 3-dim span: use the basis coordinates
  const Tensor& b = set.bases[0];
  const Tensor coords = oracle::naive_matmul(transpose(b), others);  // 3 x 5
  const Tensor t3 = oracle::naive_matmul(transpose(b), target);      // 3 x 1
  // pick the first three columns and solve the 3x3 system by Cramer's rule
  auto det3 = [](const Tensor& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  };
  Tensor m({3, 3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = coords(i, j);
  const double d = det3(m);
  REQUIRE(std::abs(d) > 1e-6);
  Tensor x({3, 1});
  for (std::size_t k = 0; k < 3; ++k) {
    Tensor mk = m;
    for (std::size_t i = 0; i < 3; ++i) mk(i, k) = t3[i];
    x[k] = det3(mk) / d;
  }
  Tensor fit({8, 1});
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t k = 0; k < 3; ++k) fit[i] += others(i, k) * x[k];
  CHECK(th::max_abs_diff(fit, target) < 1e-10);
}

TEST_CASE("pseudo-images pad, reshape, and rescale") {
  SyntheticSpec spec;
  spec.seed = 5;
  const SyntheticSet set = gen_synthetic(spec);
  const ImageDataset ds = to_pseudo_images(set);
  CHECK(ds.images.shape() == Shape{200, 6, 6});
  CHECK(bitwise_equal(ds.features, set.points));
  double lo = 1.0, hi = 0.0;
  for (double v : ds.images.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
  // padded pixels all map to the image of zero
  const double zero_level = ds.images(0, 5, 5);
  for (std::size_t j = 0; j < 200; ++j) CHECK(ds.images(j, 5, 5) == zero_level);
  CHECK_NOTHROW(validate_dataset(ds));
}
