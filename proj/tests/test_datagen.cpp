#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "fedhc/datagen.hpp"
#include "fedhc/errors.hpp"
#include "fedhc/model.hpp"
#include "fedhc/rng.hpp"

using namespace fedhc;

namespace {

// little-endianness-proof big-endian writer for IDX fixtures
void put_u32_be(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(b), 4);
}

struct IdxFixture {
    std::string images = "/tmp/fedhc_test_images.idx";
    std::string labels = "/tmp/fedhc_test_labels.idx";

    void write(std::uint32_t image_magic, std::uint32_t n_images, std::uint32_t label_magic,
               std::uint32_t n_labels, const std::vector<unsigned char>& pixels,
               const std::vector<unsigned char>& label_bytes, std::uint32_t rows = 1,
               std::uint32_t cols = 2) const {
        std::ofstream img(images, std::ios::binary);
        put_u32_be(img, image_magic);
        put_u32_be(img, n_images);
        put_u32_be(img, rows);
        put_u32_be(img, cols);
        img.write(reinterpret_cast<const char*>(pixels.data()),
                  static_cast<std::streamsize>(pixels.size()));
        img.close();
        std::ofstream lab(labels, std::ios::binary);
        put_u32_be(lab, label_magic);
        put_u32_be(lab, n_labels);
        lab.write(reinterpret_cast<const char*>(label_bytes.data()),
                  static_cast<std::streamsize>(label_bytes.size()));
    }
};

std::vector<double> class_fractions(const DataShard& s, int n_classes) {
    std::vector<double> f(n_classes, 0.0);
    for (int y : s.labels) f[y] += 1.0;
    for (double& v : f) v /= std::max(1, s.n_samples);
    return f;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return 0.5 * tv;
}

} // namespace

TEST_CASE("blob counts and determinism") {
    DataShard s = synth_blobs(3, 4, 5, 2.0, 42);
    CHECK(s.n_samples == 15);
    CHECK(s.n_features == 4);
    CHECK(s.labels.size() == 15);
    DataShard t = synth_blobs(3, 4, 5, 2.0, 42);
    CHECK(s.features == t.features);
    CHECK(s.labels == t.labels);
    DataShard u = synth_blobs(3, 4, 5, 2.0, 43);
    CHECK(s.features != u.features);
}

TEST_CASE("zero separation keeps every class at chance level") {
    DataShard s = synth_blobs(4, 6, 600, 0.0, 11);
    ModelSpec spec;
    spec.n_features = 6;
    spec.n_classes = 4;
    spec.seed = 12;
    ModelParams p = init_params(spec);
    for (int step = 0; step < 100; ++step) p = local_train_sgd(p, s, 0.1, 1, s.n_samples, 0);
    CHECK(std::abs(accuracy(p, s) - 0.25) < 0.1);
}

TEST_CASE("well-separated blobs are learnable to 99 percent") {
    DataShard s = synth_blobs(2, 2, 200, 10.0, 7);
    ModelSpec spec;
    spec.n_features = 2;
    spec.n_classes = 2;
    spec.seed = 8;
    ModelParams p = init_params(spec);
    for (int step = 0; step < 100; ++step) p = local_train_sgd(p, s, 0.1, 1, s.n_samples, 0);
    CHECK(accuracy(p, s) >= 0.99);
}

TEST_CASE("idx round trip with known bytes") {
    IdxFixture fx;
    fx.write(0x803, 2, 0x801, 2, {0, 255, 255, 0}, {7, 1});
    DataShard s = load_idx(fx.images, fx.labels);
    REQUIRE(s.n_samples == 2);
    CHECK(s.n_features == 2);
    CHECK(s.features[0] == 0.0f);
    CHECK(s.features[1] == 1.0f);
    CHECK(s.features[2] == 1.0f);
    CHECK(s.features[3] == 0.0f);
    CHECK(s.labels[0] == 7);
    CHECK(s.labels[1] == 1);
}

TEST_CASE("idx validation failures") {
    IdxFixture fx;
    SUBCASE("bad image magic") {
        fx.write(0x00000804, 2, 0x801, 2, {0, 0, 0, 0}, {0, 0});
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), Error);
    }
    SUBCASE("bad label magic") {
        fx.write(0x803, 2, 0x00000802, 2, {0, 0, 0, 0}, {0, 0});
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), Error);
    }
    SUBCASE("count mismatch between images and labels") {
        fx.write(0x803, 2, 0x801, 3, {0, 0, 0, 0}, {0, 0, 0});
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), Error);
    }
    SUBCASE("truncated image payload") {
        fx.write(0x803, 3, 0x801, 3, {0, 0, 0, 0}, {0, 0, 0}); // promises 3 rows, holds 2
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_idx("/tmp/fedhc_no_such_file.idx", fx.labels), Error);
    }
}

TEST_CASE("mnist headers when the official files are present") {
    const char* dir = std::getenv("MNIST_DIR");
    if (!dir) return; // exercised only where the dataset is installed
    DataShard s = load_idx(std::string(dir) + "/train-images-idx3-ubyte",
                           std::string(dir) + "/train-labels-idx1-ubyte");
    CHECK(s.n_samples == 60000);
    CHECK(s.n_features == 784);
}

TEST_CASE("iid partition sizes and conservation") {
    std::vector<int> labels(10, 0);
    PartitionSpec spec;
    spec.n_clients = 2;
    spec.seed = 4;
    auto idx = partition_indices(labels, 1, spec);
    REQUIRE(idx.size() == 2);
    CHECK(idx[0].size() == 5);
    CHECK(idx[1].size() == 5);

    labels.assign(11, 0);
    idx = partition_indices(labels, 1, spec);
    CHECK(idx[0].size() + idx[1].size() == 11);
    CHECK(std::abs(static_cast<int>(idx[0].size()) - static_cast<int>(idx[1].size())) <= 1);

    SUBCASE("every index lands exactly once") {
        Rng rng(5);
        std::vector<int> many(257);
        for (int& y : many) y = static_cast<int>(rng.bounded(5));
        PartitionSpec ps;
        ps.n_clients = 12;
        ps.seed = 6;
        for (PartitionScheme scheme : {PartitionScheme::iid, PartitionScheme::dirichlet}) {
            ps.scheme = scheme;
            ps.dirichlet_alpha = 0.4;
            auto parts = partition_indices(many, 5, ps);
            std::set<int> seen;
            std::size_t total = 0;
            for (const auto& c : parts) {
                total += c.size();
                for (int i : c) CHECK(seen.insert(i).second);
            }
            CHECK(total == many.size());
        }
    }
}

TEST_CASE("partition determinism per seed") {
    std::vector<int> labels(100);
    Rng rng(7);
    for (int& y : labels) y = static_cast<int>(rng.bounded(4));
    PartitionSpec spec;
    spec.n_clients = 7;
    spec.scheme = PartitionScheme::dirichlet;
    spec.dirichlet_alpha = 0.7;
    spec.seed = 12;
    CHECK(partition_indices(labels, 4, spec) == partition_indices(labels, 4, spec));
    PartitionSpec other = spec;
    other.seed = 13;
    CHECK(partition_indices(labels, 4, spec) != partition_indices(labels, 4, other));
}

TEST_CASE("huge alpha approaches the global class mix") {
    DataShard s = synth_blobs(4, 3, 500, 1.0, 21);
    PartitionSpec spec;
    spec.n_clients = 8;
    spec.scheme = PartitionScheme::dirichlet;
    spec.dirichlet_alpha = 1e6;
    spec.seed = 22;
    auto shards = partition(s, 4, spec);
    std::vector<double> global = class_fractions(s, 4);
    for (const DataShard& c : shards) {
        std::vector<double> f = class_fractions(c, 4);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(f[k] - global[k]) < 0.05);
    }
}

TEST_CASE("small alpha is more heterogeneous than large alpha") {
    DataShard s = synth_blobs(4, 3, 400, 1.0, 31);
    std::vector<double> global = class_fractions(s, 4);

    auto mean_tv = [&](double alpha) {
        PartitionSpec spec;
        spec.n_clients = 10;
        spec.scheme = PartitionScheme::dirichlet;
        spec.dirichlet_alpha = alpha;
        spec.seed = 33;
        auto shards = partition(s, 4, spec);
        double tv = 0.0;
        for (const DataShard& c : shards) tv += total_variation(class_fractions(c, 4), global);
        return tv / shards.size();
    };
    CHECK(mean_tv(0.1) > mean_tv(10.0));
}

TEST_CASE("dirichlet repairs empty shards") {
    // alpha small + few samples per class makes empty clients likely
    std::vector<int> labels(12, 0);
    PartitionSpec spec;
    spec.n_clients = 11;
    spec.scheme = PartitionScheme::dirichlet;
    spec.dirichlet_alpha = 0.05;
    spec.seed = 3;
    auto idx = partition_indices(labels, 1, spec);
    for (const auto& c : idx) CHECK(!c.empty());
}

TEST_CASE("too few samples is an error") {
    std::vector<int> labels(3, 0);
    PartitionSpec spec;
    spec.n_clients = 4;
    CHECK_THROWS_AS(partition_indices(labels, 1, spec), Error);
}
