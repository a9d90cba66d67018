#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fttgru/data/normalizer.hpp"
#include "fttgru/data/synthetic.hpp"
#include "fttgru/data/windows.hpp"

using namespace fttgru;
using namespace fttgru::data;

namespace {

std::string cmapss_row(int unit, int cycle, double base, std::size_t features = kFeatures) {
    std::ostringstream os;
    os << unit << ' ' << cycle;
    for (std::size_t j = 0; j < features; ++j) os << ' ' << base + static_cast<double>(j) * 0.5;
    os << "  \n";
    return os.str();
}

EngineSeries ramp_engine(int unit, std::size_t length) {
    EngineSeries e;
    e.unit_id = unit;
    for (std::size_t t = 0; t < length; ++t) {
        FeatureRow row{};
        for (std::size_t j = 0; j < kFeatures; ++j) row[j] = static_cast<double>(t) + 1000.0 * static_cast<double>(j);
        e.push_back(static_cast<int>(t) + 1, row);
    }
    return e;
}

std::size_t formula_count(std::size_t length) {
    const std::size_t extra = (length - 30) % 15 != 0 ? 1 : 0;
    return (length - 30) / 15 + 1 + extra;
}

/// Least squares with an intercept, solved by Gauss-Jordan elimination with partial pivoting.
std::vector<double> least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const std::size_t p = rows.front().size() + 1;
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> x{1.0};
        x.insert(x.end(), rows[i].begin(), rows[i].end());
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) a[r][c] += x[r] * x[c];
            a[r][p] += x[r] * y[i];
        }
    }
    for (std::size_t r = 0; r < p; ++r) a[r][r] += 1e-9;
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> w(p);
    for (std::size_t r = 0; r < p; ++r) w[r] = a[r][p] / a[r][r];
    return w;
}

std::vector<double> row_vector(const EngineSeries& e, std::size_t t) {
    const FeatureRow r = e.features(t);
    return {r.begin(), r.end()};
}

} // namespace

TEST_CASE("parse_cmapss groups by unit and orders by cycle", "[data]") {
    std::istringstream in(cmapss_row(2, 2, 5) + cmapss_row(1, 1, 0) + "\n" + cmapss_row(2, 1, 4) +
                          cmapss_row(1, 2, 1) + cmapss_row(1, 3, 2));
    const auto engines = parse_cmapss(in, "mem");
    REQUIRE(engines.size() == 2);
    CHECK(engines[0].unit_id == 1);
    CHECK(engines[0].cycles == std::vector<int>{1, 2, 3});
    CHECK(engines[1].cycles == std::vector<int>{1, 2});
    CHECK(engines[1].settings[0][0] == 4.0);
    CHECK(engines[1].sensors[1][20] == 5.0 + 23 * 0.5);
    CHECK(engines[0].features(2)[3] == 2.0 + 1.5);
}

TEST_CASE("parse_cmapss errors name the line", "[data]") {
    const std::string good = cmapss_row(1, 1, 0);
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            parse_cmapss(in, "mem");
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of(good + cmapss_row(1, 2, 0, kFeatures - 1)) == 2);
    CHECK(line_of(good + cmapss_row(1, 2, 0, kFeatures + 1)) == 2);
    std::string bad_number = cmapss_row(1, 2, 0);
    bad_number.replace(bad_number.find("0.5"), 3, "abc");
    CHECK(line_of(good + "\n" + bad_number) == 3);
    CHECK(line_of(good + "1.5" + cmapss_row(1, 2, 0).substr(1)) == 2);

    CHECK(line_of(good + cmapss_row(1, 3, 0)) == 2);
    CHECK(line_of(cmapss_row(1, 2, 0)) == 1);
    CHECK(line_of(good + cmapss_row(1, 1, 0)) == 2);

    CHECK_THROWS_AS(parse_cmapss("/nonexistent/train_FD001.txt"), IoError);
}

TEST_CASE("RUL file parsing", "[data]") {
    std::istringstream ok("112\n98 \n\n69\n");
    CHECK(parse_rul_file(ok, "mem") == std::vector<double>{112, 98, 69});
    std::istringstream bad("12\n1.5\n");
    CHECK_THROWS_AS(parse_rul_file(bad, "mem"), ParseError);
    std::istringstream negative("-3\n");
    CHECK_THROWS_AS(parse_rul_file(negative, "mem"), ParseError);
}

TEST_CASE("label_rul", "[data]") {
    const EngineSeries e = ramp_engine(1, 192);
    const auto rul = label_rul(e);
    CHECK(rul.back() == 0.0);
    CHECK(rul.front() == 191.0);
    const auto capped = label_rul(e, 125);
    CHECK(capped.front() == 125.0);
    CHECK(capped.back() == 0.0);
    CHECK(capped[100] == 91.0);
    CHECK_THROWS_AS(label_rul(EngineSeries{}), ShapeError);
}

TEST_CASE("normalizer", "[data]") {
    std::vector<EngineSeries> train{ramp_engine(1, 40), ramp_engine(2, 60)};
    FeatureRow flat{};
    for (auto& e : train)
        for (auto& s : e.sensors) s[4] = 7.0;  // constant feature 7
    const Normalizer n = Normalizer::fit(train);
    CHECK(n.min()[0] == 0.0);
    CHECK(n.max()[0] == 59.0);
    const auto scaled = n.apply(train);
    for (std::size_t j = 0; j < kFeatures; ++j) {
        double lo = 1e300, hi = -1e300;
        for (const auto& e : scaled)
            for (std::size_t t = 0; t < e.length(); ++t) {
                const double v = e.features(t)[j];
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (j == kSettings + 4) {
            CHECK(lo == 0.0);
            CHECK(hi == 0.0);
        } else {
            CHECK(lo == 0.0);
            CHECK(hi == 1.0);
        }
    }
    FeatureRow outside = train[1].features(59);
    outside[0] = 118.0;
    CHECK(n.apply(outside)[0] == Catch::Approx(2.0));
    CHECK_THROWS_AS(Normalizer{}.apply(flat), ConfigError);
    CHECK_THROWS_AS(Normalizer::fit({}), ShapeError);
}

TEST_CASE("window starts", "[data]") {
    const WindowSpec spec;
    CHECK(spec.stride() == 15);
    CHECK(window_starts(100, spec) == std::vector<long>{0, 15, 30, 45, 60, 70});
    CHECK(window_starts(30, spec) == std::vector<long>{0});
    CHECK(window_starts(20, spec) == std::vector<long>{-10});
    CHECK(window_starts(45, spec) == std::vector<long>{0, 15});
    CHECK_THROWS_AS(window_starts(50, WindowSpec{0, 0.5}), ConfigError);
    CHECK_THROWS_AS(window_starts(50, WindowSpec{30, 1.0}), ConfigError);
    CHECK_THROWS_AS(window_starts(50, WindowSpec{30, -0.1}), ConfigError);
    for (std::size_t length = 30; length <= 400; ++length) {
        INFO("length " << length);
        CHECK(window_starts(length, spec).size() == formula_count(length));
    }
}

TEST_CASE("training windows", "[data]") {
    const std::vector<EngineSeries> engines{ramp_engine(3, 100), ramp_engine(5, 20), ramp_engine(9, 31)};
    const WindowBatch batch = make_train_windows(engines);
    REQUIRE(batch.size() == 6 + 1 + 2);
    CHECK(batch.x.shape() == Shape{9, 30, 24});
    CHECK(batch.engine_ids == std::vector<int>{3, 3, 3, 3, 3, 3, 5, 9, 9});
    CHECK(batch.starts == std::vector<long>{0, 15, 30, 45, 60, 70, -10, 0, 1});
    CHECK(batch.y[0] == 70.0);
    CHECK(batch.y[5] == 0.0);
    CHECK(batch.y[6] == 0.0);
    CHECK(batch.y[7] == 1.0);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        CHECK(batch.y[b] >= 0.0);
        const auto& e = engines[b < 6 ? 0 : (b == 6 ? 1 : 2)];
        CHECK(batch.y[b] <= static_cast<double>(e.length()) - 1.0);
        for (std::size_t i = 0; i < 30; ++i) {
            const long t = std::max(0L, batch.starts[b] + static_cast<long>(i));
            CHECK(batch.x.at(b, i, 7) == e.features(static_cast<std::size_t>(t))[7]);
        }
    }
    // Padded engine: first 10 rows repeat row 0.
    for (std::size_t i = 0; i < 11; ++i) CHECK(batch.x.at(6, i, 0) == 0.0);
    CHECK(batch.x.at(6, 11, 0) == 1.0);

    const WindowBatch capped = make_train_windows(engines, {}, 50);
    CHECK(capped.y[0] == 50.0);
    CHECK_THROWS_AS(make_train_windows({}), ShapeError);
}

TEST_CASE("test windows", "[data]") {
    const std::vector<EngineSeries> engines{ramp_engine(1, 50), ramp_engine(2, 12)};
    const WindowBatch batch = make_test_windows(engines, {17, 40});
    REQUIRE(batch.size() == 2);
    CHECK(batch.y[0] == 17.0);
    CHECK(batch.y[1] == 40.0);
    for (std::size_t j = 0; j < kFeatures; ++j) {
        CHECK(batch.x.at(0, 29, j) == engines[0].features(49)[j]);
        CHECK(batch.x.at(1, 29, j) == engines[1].features(11)[j]);
        CHECK(batch.x.at(1, 0, j) == engines[1].features(0)[j]);
    }
    CHECK(batch.starts == std::vector<long>{20, -18});
    CHECK_THROWS_AS(make_test_windows(engines, {17}), ShapeError);
}

TEST_CASE("gather keeps rows aligned", "[data]") {
    const WindowBatch batch = make_train_windows({ramp_engine(1, 100)});
    const WindowBatch picked = batch.gather({5, 0, 5});
    CHECK(picked.size() == 3);
    CHECK(picked.y[0] == batch.y[5]);
    CHECK(picked.starts[1] == 0);
    CHECK(picked.x.at(2, 29, 0) == batch.x.at(5, 29, 0));
}

TEST_CASE("validation split holds out the last engines by unit id", "[data]") {
    std::vector<EngineSeries> engines;
    for (int u = 100; u >= 1; --u) engines.push_back(ramp_engine(u, 31));
    const auto [train, val] = split_validation(engines, 0.1);
    REQUIRE(train.size() == 90);
    REQUIRE(val.size() == 10);
    CHECK(train.front().unit_id == 1);
    CHECK(train.back().unit_id == 90);
    CHECK(val.front().unit_id == 91);
    CHECK(val.back().unit_id == 100);
    CHECK(split_validation(engines, 0.0).second.empty());
    CHECK(split_validation({ramp_engine(1, 31), ramp_engine(2, 31)}, 0.1).second.size() == 1);
    CHECK_THROWS_AS(split_validation(engines, 1.0), ConfigError);
}

TEST_CASE("synthetic generator", "[data]") {
    const SyntheticData a = synth_generate(20, 7);
    const SyntheticData b = synth_generate(20, 7);
    const SyntheticData c = synth_generate(20, 8);
    REQUIRE(a.train.size() == 20);
    REQUIRE(a.test.size() == 20);
    REQUIRE(a.test_rul.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(a.train[i].sensors == b.train[i].sensors);
        CHECK(a.test[i].settings == b.test[i].settings);
        CHECK(a.train[i].length() >= 150);
        CHECK(a.train[i].length() <= 300);
        const double life = static_cast<double>(a.test[i].length()) + a.test_rul[i];
        CHECK(life >= 150);
        CHECK(life <= 300);
        CHECK(a.test[i].length() >= 30);
        CHECK(a.test_rul[i] >= 1);
    }
    CHECK(a.test_rul == b.test_rul);
    CHECK_FALSE(a.train[0].sensors == c.train[0].sensors);
    CHECK_THROWS_AS(synth_generate(0, 1), ConfigError);
}

TEST_CASE("last-row linear regression explains synthetic test RUL", "[data]") {
    const SyntheticData d = synth_generate(60, 3);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& e : d.train) {
        const auto rul = label_rul(e);
        for (std::size_t t = 0; t < e.length(); t += 5) {
            x.push_back(row_vector(e, t));
            y.push_back(rul[t]);
        }
    }
    const auto w = least_squares(x, y);
    double mean = 0;
    for (double v : d.test_rul) mean += v;
    mean /= static_cast<double>(d.test_rul.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < d.test.size(); ++i) {
        const auto row = row_vector(d.test[i], d.test[i].length() - 1);
        double pred = w[0];
        for (std::size_t j = 0; j < row.size(); ++j) pred += w[j + 1] * row[j];
        ss_res += (pred - d.test_rul[i]) * (pred - d.test_rul[i]);
        ss_tot += (d.test_rul[i] - mean) * (d.test_rul[i] - mean);
    }
    CHECK(1.0 - ss_res / ss_tot > 0.0);
}

TEST_CASE("FD001 files when available", "[data][fd001]") {
    const char* dir = std::getenv("FTTGRU_DATA_DIR");
    const std::filesystem::path root = dir ? dir : "";
    if (!dir || !std::filesystem::exists(root / "train_FD001.txt")) {
        SKIP("FTTGRU_DATA_DIR does not point at the FD001 files");
    }
    const auto train = parse_cmapss((root / "train_FD001.txt").string());
    CHECK(train.size() == 100);
    std::ifstream in(root / "train_FD001.txt");
    std::size_t lines = 0;
    std::string text;
    while (std::getline(in, text))
        if (text.find_first_not_of(" \t\r") != std::string::npos) ++lines;
    std::size_t rows = 0;
    for (const auto& e : train) rows += e.length();
    CHECK(rows == lines);
    const auto test = parse_cmapss((root / "test_FD001.txt").string());
    const auto rul = parse_rul_file((root / "RUL_FD001.txt").string());
    CHECK(make_test_windows(test, rul).size() == 100);
}
