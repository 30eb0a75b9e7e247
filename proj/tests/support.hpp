#ifndef ABDUCTREE_TESTS_SUPPORT_HPP
#define ABDUCTREE_TESTS_SUPPORT_HPP

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"
#include "abductree/model_io.hpp"
#include "abductree/reference/generators.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>
#include <unistd.h>

namespace abductree::test {

inline std::string fixture(const std::string& relative)
{
    return std::string(ABDUCTREE_FIXTURE_DIR) + "/" + relative;
}

inline Model zoo_model()
{
    return parse_model(read_file(fixture("zoo/zoo.model.json")), read_file(fixture("zoo/zoo.fmap")));
}

inline std::vector<Cube> zoo_rows(const Model& model)
{
    return parse_instances(read_file(fixture("zoo/zoo.csv")), model.features);
}

// Row order of zoo.csv.
enum ZooRow : std::size_t { kPitviper = 0, kBear = 1, kToad = 2 };
enum ZooClass : ClassId { kAmphibian = 0, kBird, kBug, kFish, kInvertebrate, kMammal, kReptile };

inline FeatureId feature(const Model& model, std::string_view name)
{
    const auto f = model.features.find(name);
    if (!f)
        throw std::invalid_argument("no feature " + std::string(name));
    return *f;
}

/// The literals of `instance` on the named features.
inline Cube pick(const Model& model, const Cube& instance, std::initializer_list<std::string_view> names)
{
    std::vector<FeatureId> ids;
    for (auto n : names)
        ids.push_back(feature(model, n));
    return restrict(instance, ids);
}

inline Literal lit(const Model& model, std::string_view name, Value value)
{
    return {feature(model, name), std::move(value)};
}

/// Directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("abductree-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string write(const std::string& name, std::string_view content) const
    {
        const auto p = path_ / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Small model with every feature kind, as used across the property suites.
inline reference::RandomModelSpec mixed_spec(reference::Rng& rng)
{
    reference::RandomModelSpec spec;
    spec.num_features = 3 + rng() % 5;
    spec.num_classes = 1 + rng() % 3;
    spec.trees_per_class = 1 + rng() % 3;
    spec.max_depth = 1 + rng() % 3;
    spec.categorical_share = 0.3;
    spec.continuous_share = 0.3;
    return spec;
}

}  // namespace abductree::test

namespace doctest {
template <>
struct StringMaker<abductree::Rational> {
    static String convert(const abductree::Rational& r) { return r.get_str().c_str(); }
};
template <class T>
struct StringMaker<std::vector<T>> {
    static String convert(const std::vector<T>& v)
    {
        String out = "[";
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? ", " : "") + StringMaker<T>::convert(v[i]);
        return out + "]";
    }
};
}  // namespace doctest

#endif  // ABDUCTREE_TESTS_SUPPORT_HPP
