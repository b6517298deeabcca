#include <doctest.h>

#include <cmath>
#include <random>

#include "kinalign/errors.hpp"
#include "kinalign/metrics.hpp"
#include "kinalign/scenegen.hpp"

using namespace kinalign;

namespace {

std::mt19937_64 rng(71);

MaskImage random_mask(int w, int h, double density) {
    MaskImage m(w, h, 0);
    for (auto& v : m.data) {
        v = (static_cast<double>(rng() >> 11) * 0x1p-53) < density ? 1 : 0;
    }
    return m;
}

/// Independent counting route: walk every pixel and tally the three sets.
double dice_oracle(const MaskImage& a, const MaskImage& b) {
    long long inter = 0, pa = 0, pb = 0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (a.at(x, y) && b.at(x, y)) ++inter;
            if (a.at(x, y)) ++pa;
            if (b.at(x, y)) ++pb;
        }
    }
    if (pa + pb == 0) return 1.0;
    return 2.0 * inter / static_cast<double>(pa + pb);
}

}  // namespace

TEST_CASE("dice: identical non-empty masks score 1") {
    const MaskImage m = random_mask(16, 12, 0.4);
    CHECK(dice(m, m) == 1.0);
}

TEST_CASE("dice: disjoint non-empty masks score 0") {
    MaskImage a(8, 8, 0), b(8, 8, 0);
    a.at(1, 1) = 1;
    b.at(5, 5) = 1;
    CHECK(dice(a, b) == 0.0);
}

TEST_CASE("dice: 2-pixel prediction inside a 4-pixel target scores 2/3") {
    MaskImage pred(8, 8, 0), gt(8, 8, 0);
    gt.at(2, 2) = gt.at(3, 2) = gt.at(2, 3) = gt.at(3, 3) = 1;
    pred.at(2, 2) = pred.at(3, 2) = 1;
    CHECK(dice(pred, gt) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("dice: both masks empty scores 1 by convention") {
    const MaskImage a(6, 6, 0), b(6, 6, 0);
    CHECK(dice(a, b) == 1.0);
}

TEST_CASE("dice: symmetric and matches brute-force counting") {
    for (int i = 0; i < 50; ++i) {
        const MaskImage a = random_mask(20, 15, 0.3);
        const MaskImage b = random_mask(20, 15, 0.5);
        const double d = dice(a, b);
        CHECK(d == dice(b, a));
        CHECK(d == doctest::Approx(dice_oracle(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("dice: size mismatch throws") {
    CHECK_THROWS_AS(dice(MaskImage(4, 4), MaskImage(4, 5)), DimensionMismatch);
}

TEST_CASE("joint_mae: equal configs score 0") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 2)[0];
    CHECK(joint_mae(q, q, chain) == 0.0);
}

TEST_CASE("joint_mae: single revolute offset reads back in degrees") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 2)[0];
    JointConfig p = q;
    p[0] += deg_to_rad(2.0);
    // Five revolute joints share the mean, so one 2 degree offset reads 0.4.
    CHECK(joint_mae(p, q, chain) == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("joint_mae: mean of two offsets") {
    DHChain chain;
    chain.rows.resize(2);
    chain.rows[0].kind = JointKind::Revolute;
    chain.rows[1].kind = JointKind::Revolute;
    chain.joint_limits = {{-3.2, 3.2}, {-3.2, 3.2}};
    JointConfig a(std::vector<double>{0.0, 0.0});
    JointConfig b(std::vector<double>{deg_to_rad(1.0), deg_to_rad(-3.0)});
    CHECK(joint_mae(a, b, chain) == doctest::Approx(2.0));
}

TEST_CASE("joint_mae: prismatic joints are excluded from the degree metric") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 2)[0];
    JointConfig p = q;
    p[2] += 0.005;
    CHECK(joint_mae(p, q, chain) == 0.0);
    CHECK(prismatic_mae_mm(p, q, chain) == doctest::Approx(5.0));
}

TEST_CASE("joint_mae: triangle inequality") {
    const DHChain chain = demo_chain();
    const auto traj = generate_trajectory(chain, 3, 8);
    const double ab = joint_mae(traj[0], traj[1], chain);
    const double bc = joint_mae(traj[1], traj[2], chain);
    const double ac = joint_mae(traj[0], traj[2], chain);
    CHECK(ac <= ab + bc + 1e-12);
}

TEST_CASE("joint_mae: length mismatch throws") {
    const DHChain chain = demo_chain();
    JointConfig a(std::vector<double>(6, 0.0));
    JointConfig b(std::vector<double>(5, 0.0));
    CHECK_THROWS_AS(joint_mae(a, b, chain), LengthMismatch);
}

TEST_CASE("aggregate: single record has zero spread") {
    EvalRecord r;
    r.dice_final = 0.9;
    r.mae_final_deg = 0.25;
    r.domain = "regular";
    const Summary s = aggregate({r});
    REQUIRE(s.domains.size() == 1);
    CHECK(s.domains[0].frames == 1);
    CHECK(s.domains[0].dice_final.mean == doctest::Approx(0.9));
    CHECK(s.domains[0].dice_final.stddev == 0.0);
}

TEST_CASE("aggregate: two records give mean 92 and population std 2") {
    EvalRecord a, b;
    a.dice_final = 90.0;
    b.dice_final = 94.0;
    const Summary s = aggregate({a, b});
    REQUIRE(s.domains.size() == 1);
    CHECK(s.domains[0].dice_final.mean == doctest::Approx(92.0));
    CHECK(s.domains[0].dice_final.stddev == doctest::Approx(2.0));
}

TEST_CASE("aggregate: groups by domain and renders JSON and table") {
    EvalRecord a, b, c;
    a.domain = "regular";
    b.domain = "smoke";
    c.domain = "smoke";
    a.frame_id = 0;
    b.frame_id = 1;
    c.frame_id = 2;
    const Summary s = aggregate({a, b, c});
    REQUIRE(s.domains.size() == 2);
    CHECK(s.domains[0].domain == "regular");
    CHECK(s.domains[1].domain == "smoke");
    CHECK(s.domains[1].frames == 2);
    CHECK(s.to_json().find("\"smoke\"") != std::string::npos);
    CHECK(s.to_table().find("smoke") != std::string::npos);
}

TEST_CASE("aggregate: empty input throws") {
    CHECK_THROWS_AS(aggregate({}), EmptyList);
}

TEST_CASE("records_to_csv: one line per record plus header") {
    EvalRecord a, b;
    a.frame_id = 0;
    b.frame_id = 1;
    const std::string csv = records_to_csv({a, b});
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.rfind("frame_id,domain,", 0) == 0);
}
