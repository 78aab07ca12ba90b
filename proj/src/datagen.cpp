#include "fedhc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "fedhc/errors.hpp"
#include "fedhc/rng.hpp"

namespace fedhc {

namespace {

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw Error(ErrorCode::TruncatedFile, path + ": unexpected end of file in header");
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

} // namespace

DataShard synth_blobs(int n_classes, int n_features, int samples_per_class,
                      double class_separation, std::uint64_t seed) {
    if (n_classes < 1 || n_features < 1 || samples_per_class < 1)
        throw Error(ErrorCode::InvalidArgument, "blob counts must be >= 1");
    if (class_separation < 0.0)
        throw Error(ErrorCode::InvalidArgument, "class separation must be >= 0");

    Rng rng(Rng::mix(seed, Rng::tag("blobs")));

    // class means: random directions scaled to the requested separation
    std::vector<std::vector<double>> means(n_classes, std::vector<double>(n_features, 0.0));
    for (int c = 0; c < n_classes; ++c) {
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (int j = 0; j < n_features; ++j) {
                means[c][j] = rng.normal();
                norm_sq += means[c][j] * means[c][j];
            }
        } while (norm_sq < 1e-12);
        double scale = class_separation / std::sqrt(norm_sq);
        for (int j = 0; j < n_features; ++j) means[c][j] *= scale;
    }

    DataShard shard;
    shard.n_features = n_features;
    shard.n_samples = n_classes * samples_per_class;
    shard.features.reserve(static_cast<std::size_t>(shard.n_samples) * n_features);
    shard.labels.reserve(shard.n_samples);
    for (int c = 0; c < n_classes; ++c) {
        for (int s = 0; s < samples_per_class; ++s) {
            for (int j = 0; j < n_features; ++j)
                shard.features.push_back(static_cast<float>(means[c][j] + rng.normal()));
            shard.labels.push_back(c);
        }
    }
    return shard;
}

DataShard load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw Error(ErrorCode::IoError, "cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw Error(ErrorCode::IoError, "cannot open " + labels_path);

    std::uint32_t img_magic = read_u32_be(img, images_path);
    if (img_magic != 0x00000803u)
        throw Error(ErrorCode::BadMagic, images_path + ": expected image magic 0x00000803");
    std::uint32_t n_images = read_u32_be(img, images_path);
    std::uint32_t rows = read_u32_be(img, images_path);
    std::uint32_t cols = read_u32_be(img, images_path);

    std::uint32_t lab_magic = read_u32_be(lab, labels_path);
    if (lab_magic != 0x00000801u)
        throw Error(ErrorCode::BadMagic, labels_path + ": expected label magic 0x00000801");
    std::uint32_t n_labels = read_u32_be(lab, labels_path);

    if (n_images != n_labels)
        throw Error(ErrorCode::CountMismatch,
                    "image count " + std::to_string(n_images) + " != label count " +
                        std::to_string(n_labels));

    std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    DataShard shard;
    shard.n_samples = static_cast<int>(n_images);
    shard.n_features = static_cast<int>(pixels);
    shard.features.resize(static_cast<std::size_t>(n_images) * pixels);
    shard.labels.resize(n_images);

    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw Error(ErrorCode::TruncatedFile, images_path + ": truncated image data");
        float* dst = shard.features.data() + static_cast<std::size_t>(i) * pixels;
        for (std::size_t p = 0; p < pixels; ++p) dst[p] = static_cast<float>(buf[p]) / 255.0f;
    }
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        unsigned char b;
        if (!lab.read(reinterpret_cast<char*>(&b), 1))
            throw Error(ErrorCode::TruncatedFile, labels_path + ": truncated label data");
        shard.labels[i] = static_cast<int>(b);
    }
    return shard;
}

std::vector<std::vector<int>> partition_indices(const std::vector<int>& labels, int n_classes,
                                                const PartitionSpec& spec) {
    int n = static_cast<int>(labels.size());
    if (spec.n_clients < 1)
        throw Error(ErrorCode::InvalidArgument, "n_clients must be >= 1");
    if (n < spec.n_clients)
        throw Error(ErrorCode::TooFewSamples,
                    std::to_string(n) + " samples cannot cover " +
                        std::to_string(spec.n_clients) + " clients");

    Rng rng(Rng::mix(spec.seed, Rng::tag("partition")));
    std::vector<std::vector<int>> clients(spec.n_clients);

    if (spec.scheme == PartitionScheme::iid) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        int base = n / spec.n_clients;
        int extra = n % spec.n_clients;
        int pos = 0;
        for (int c = 0; c < spec.n_clients; ++c) {
            int take = base + (c < extra ? 1 : 0);
            clients[c].assign(order.begin() + pos, order.begin() + pos + take);
            pos += take;
        }
    } else {
        if (!(spec.dirichlet_alpha > 0.0))
            throw Error(ErrorCode::InvalidArgument, "dirichlet_alpha must be > 0");
        for (int cls = 0; cls < n_classes; ++cls) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (labels[i] == cls) idx.push_back(i);
            if (idx.empty()) continue;
            rng.shuffle(idx);

            // client shares of this class ~ Dirichlet(alpha, ..., alpha)
            std::vector<double> props(spec.n_clients);
            double total = 0.0;
            for (double& p : props) {
                p = rng.gamma(spec.dirichlet_alpha);
                total += p;
            }
            if (total <= 0.0) {
                props.assign(spec.n_clients, 1.0);
                total = spec.n_clients;
            }
            for (double& p : props) p /= total;

            // largest-remainder rounding of per-client counts
            int n_cls = static_cast<int>(idx.size());
            std::vector<int> counts(spec.n_clients);
            std::vector<std::pair<double, int>> remainders;
            int assigned = 0;
            for (int c = 0; c < spec.n_clients; ++c) {
                double exact = props[c] * n_cls;
                counts[c] = static_cast<int>(std::floor(exact));
                assigned += counts[c];
                remainders.push_back({exact - counts[c], c});
            }
            std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (int r = 0; r < n_cls - assigned; ++r) ++counts[remainders[r].second];

            int pos = 0;
            for (int c = 0; c < spec.n_clients; ++c) {
                clients[c].insert(clients[c].end(), idx.begin() + pos, idx.begin() + pos + counts[c]);
                pos += counts[c];
            }
        }
        // repair empty clients by pulling one sample from the largest
        for (int c = 0; c < spec.n_clients; ++c) {
            if (!clients[c].empty()) continue;
            int largest = 0;
            for (int o = 1; o < spec.n_clients; ++o)
                if (clients[o].size() > clients[largest].size()) largest = o;
            if (clients[largest].size() <= 1)
                throw Error(ErrorCode::TooFewSamples, "cannot repair empty client shard");
            clients[c].push_back(clients[largest].back());
            clients[largest].pop_back();
        }
    }

    for (auto& c : clients) std::sort(c.begin(), c.end());
    return clients;
}

std::vector<DataShard> partition(const DataShard& shard, int n_classes, const PartitionSpec& spec) {
    auto idx = partition_indices(shard.labels, n_classes, spec);
    std::vector<DataShard> out;
    out.reserve(idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
        DataShard s = subset(shard, idx[c]);
        s.owner = static_cast<int>(c);
        out.push_back(std::move(s));
    }
    return out;
}

DataShard subset(const DataShard& shard, const std::vector<int>& indices) {
    DataShard out;
    out.n_features = shard.n_features;
    out.n_samples = static_cast<int>(indices.size());
    out.owner = shard.owner;
    out.features.reserve(indices.size() * static_cast<std::size_t>(shard.n_features));
    out.labels.reserve(indices.size());
    for (int i : indices) {
        const float* r = shard.row(i);
        out.features.insert(out.features.end(), r, r + shard.n_features);
        out.labels.push_back(shard.labels[i]);
    }
    return out;
}

} // namespace fedhc
