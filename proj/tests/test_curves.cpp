#include <doctest.h>

#include "wormnc/curves.hpp"
#include "wormnc/errors.hpp"

using namespace wormnc;

TEST_CASE("delay bound of a leaky bucket over a rate-latency server") {
    CHECK(horizontal_deviation(ArrivalCurve(make_rat(3), make_rat(1, 20)),
                               ServiceCurve(make_rat(1), make_rat(3)))
              .cycles == make_rat(6));
    CHECK(horizontal_deviation(ArrivalCurve(make_rat(0), make_rat(0)),
                               ServiceCurve(make_rat(1), make_rat(0)))
              .cycles == make_rat(0));
    CHECK(horizontal_deviation(ArrivalCurve(make_rat(5), make_rat(1, 4)),
                               ServiceCurve(make_rat(2), make_rat(4)))
              .cycles == make_rat(13, 2));
}

TEST_CASE("backlog bound") {
    CHECK(backlog_bound(ArrivalCurve(make_rat(3), make_rat(1, 20)),
                        ServiceCurve(make_rat(1), make_rat(2))) == make_rat(31, 10));
    CHECK(backlog_bound(ArrivalCurve(make_rat(0), make_rat(0)),
                        ServiceCurve(make_rat(1), make_rat(7))) == make_rat(0));
    // sigma + rho * T evaluated by hand: 6 + 0.05 * 6.526315789...
    Rat latency = make_rat(6) + (make_rat(6) + make_rat(1, 5)) / make_rat(19, 20);
    Rat expect = make_rat(6) + make_rat(1, 20) * latency;
    CHECK(backlog_bound(ArrivalCurve(make_rat(6), make_rat(1, 20)),
                        ServiceCurve(make_rat(19, 20), latency)) == expect);
}

TEST_CASE("output curve through a rate-latency server") {
    ArrivalCurve out = output_curve(ArrivalCurve(make_rat(3), make_rat(1, 20)),
                                    ServiceCurve(make_rat(1), make_rat(2)));
    CHECK(out.sigma == make_rat(31, 10));
    CHECK(out.rho == make_rat(1, 20));

    ArrivalCurve same = output_curve(ArrivalCurve(make_rat(7), make_rat(1, 3)),
                                     ServiceCurve(make_rat(2), make_rat(0)));
    CHECK(same.sigma == make_rat(7));
    CHECK(same.rho == make_rat(1, 3));

    // burst growth through a contended three-node section
    Rat lat = make_rat(3) + (make_rat(31, 10) + make_rat(1, 20) * make_rat(4)) / make_rat(19, 20);
    ArrivalCurve grown = output_curve(ArrivalCurve(make_rat(3), make_rat(1, 20)),
                                      ServiceCurve(make_rat(19, 20), lat));
    CHECK(doctest::Approx(rat_to_double(grown.sigma)).epsilon(1e-9) == 3.323684211);
}

TEST_CASE("stability errors carry the residual") {
    CHECK_THROWS_AS(horizontal_deviation(ArrivalCurve(make_rat(1), make_rat(2)),
                                         ServiceCurve(make_rat(1), make_rat(0))),
                    UnstableSystem);
    CHECK_THROWS_AS(output_curve(ArrivalCurve(make_rat(1), make_rat(2)),
                                 ServiceCurve(make_rat(1), make_rat(0))),
                    UnstableSystem);
}

TEST_CASE("left-over service over a contended path") {
    // three uniform nodes, one same-priority interferer converging at the first
    std::vector<PmooNode> nodes(3, PmooNode{make_rat(1), make_rat(1), make_rat(0), make_rat(3)});
    std::vector<PmooInterferer> one{
        PmooInterferer{make_rat(31, 10), make_rat(1, 20), {0}}};
    ServiceCurve beta = pmoo_left_over(nodes, one);
    CHECK(beta.rate == make_rat(19, 20));
    CHECK(beta.latency == make_rat(3) + (make_rat(31, 10) + make_rat(1, 20) * make_rat(4)) / make_rat(19, 20));

    // no interference: latency is the plain latency sum
    std::vector<PmooNode> four(4, PmooNode{make_rat(1), make_rat(1), make_rat(0), make_rat(0)});
    ServiceCurve idle = pmoo_left_over(four, {});
    CHECK(idle.rate == make_rat(1));
    CHECK(idle.latency == make_rat(4));

    // single node, one interferer with serialization T + L/R = 4
    std::vector<PmooNode> single(1, PmooNode{make_rat(1), make_rat(1), make_rat(0), make_rat(3)});
    Rat burst = rat_from_string("3.323684211");
    ServiceCurve b3 = pmoo_left_over(single, {PmooInterferer{burst, make_rat(1, 20), {0}}});
    CHECK(b3.rate == make_rat(19, 20));
    CHECK(b3.latency == make_rat(1) + (burst + make_rat(1, 5)) / make_rat(19, 20));

    // an interferer saturating the rate is rejected
    CHECK_THROWS_AS(pmoo_left_over(single, {PmooInterferer{make_rat(1), make_rat(1), {0}}}),
                    UnstableSystem);
}

TEST_CASE("decimal rendering") {
    CHECK(rat_to_decimal(make_rat(1, 3), 6) == "0.333333");
    CHECK(rat_to_decimal(make_rat(1, 3), 6, true) == "0.333334");
    CHECK(rat_to_decimal(make_rat(-5, 2), 2) == "-2.50");
    CHECK(rat_to_string(rat_from_string("0.05")) == "1/20");
    CHECK(rat_from_string("3/60") == make_rat(1, 20));
    CHECK(rat_from_string("1.25e2") == make_rat(125));
}
