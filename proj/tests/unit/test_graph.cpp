#include <doctest.h>

#include "builders.hpp"

using namespace sft;

TEST_SUITE("graph") {
  TEST_CASE("minimal chain validates") {
    auto r = validate_graph(chain_graph(1e3, 1000));
    CHECK(r.ok());
  }

  TEST_CASE("a back edge from the output is a cycle") {
    auto g = chain_graph(1e3, 1000);
    g.links.push_back(make_link("out", "s"));
    auto r = validate_graph(g);
    CHECK(r.has(Violation::Kind::cycle));
    CHECK_THROWS_AS(topological_order(g), ModelError);
  }

  TEST_CASE("classifier without reduction target") {
    auto g = chain_graph(1e3, 1000);
    g.process("p").classifier = normal_model(1, 0);
    CHECK(validate_graph(g).has(Violation::Kind::classifier_without_reduction));
    g.process("p").classifier.reset();
    g.process("p").reduction_target = 10.0;
    CHECK(validate_graph(g).has(Violation::Kind::reduction_without_classifier));
  }

  TEST_CASE("structural violations") {
    auto g = chain_graph(1e3, 1000);
    g.nodes.push_back(OutputNode{"out2"});
    g.links.push_back(make_link("p", "out2"));
    CHECK(validate_graph(g).has(Violation::Kind::multiple_outputs));

    g = chain_graph(1e3, 1000);
    g.nodes.push_back(make_process("lonely"));
    CHECK(validate_graph(g).has(Violation::Kind::missing_predecessor));

    g = chain_graph(1e3, 1000);
    g.links.push_back(make_link("s", "nowhere"));
    CHECK(validate_graph(g).has(Violation::Kind::dangling_reference));

    g = chain_graph(1e3, 1000);
    g.nodes.push_back(make_sensor("dead_end", 1e3, 10));
    CHECK(validate_graph(g).has(Violation::Kind::orphan));
  }

  TEST_CASE("event-building merge needs equal rates") {
    PipelineGraph g;
    g.nodes.push_back(make_sensor("a", 1e3, 10));
    g.nodes.push_back(make_sensor("b", 2e3, 10));
    g.nodes.push_back(make_process("m"));
    g.nodes.push_back(OutputNode{"out"});
    g.links = {make_link("a", "m"), make_link("b", "m"), make_link("m", "out")};
    CHECK(validate_graph(g).has(Violation::Kind::rate_mismatch));
    g.sensor("b").sample_rate = 1e3 * (1 + 1e-7);
    CHECK(validate_graph(g).ok());
  }

  TEST_CASE("pass-through conserves storage rate") {
    auto g = chain_graph(1e3, 1000);
    auto fa = propagate(g);
    CHECK(fa.storage_rate == 1e6);
    CHECK(fa.output_id == "out");
    CHECK(fa.edge("p->out").flow.rate == 1e3);
  }

  TEST_CASE("non-classifying nodes conserve the true and false populations") {
    auto g = chain_graph(1e3, 1000, 0.25);
    auto fa = propagate(g);
    const auto& e = fa.edge("p->out").flow;
    CHECK(e.n_true == 250.0);
    CHECK(e.n_false == 750.0);
    CHECK(e.n_true + e.n_false == e.rate);
  }

  TEST_CASE("classifier nodes emit rate / reduction and record a confusion matrix") {
    auto g = chain_graph(4e4, 100, 0.01);
    g.process("p").classifier = normal_model(2, 0);
    g.process("p").reduction_target = 400.0;
    auto fa = propagate(g);
    const auto& nf = fa.node("p");
    REQUIRE(nf.confusion);
    CHECK(nf.outgoing.rate == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(nf.confusion->tp + nf.confusion->fn == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(nf.confusion->fp + nf.confusion->tn == doctest::Approx(39600.0).epsilon(1e-9));
  }

  TEST_CASE("link and node power") {
    // 1e12 bits/s over a 22 pJ/bit link.
    PipelineGraph g = chain_graph(1e6, 1e6);
    g.links[0].energy_per_bit = 22e-12;
    g.process("p").complexity = ScalarFunction::linear(2.0);
    g.process("p").energy_per_op = 1e-12;
    auto fa = propagate(g);
    CHECK(link_power(g, fa, "s->p") == doctest::Approx(22.0).epsilon(1e-12));
    CHECK(node_power(g, fa, "p") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(link_power(g, fa, "p->out") == 0.0);
    CHECK(total_power(g, fa) == doctest::Approx(24.0).epsilon(1e-12));
    CHECK_THROWS_AS(node_power(g, fa, "nope"), UnknownIdError);
    CHECK_THROWS_AS(link_power(g, fa, "nope"), UnknownIdError);
  }

  TEST_CASE("edge carrying no bits draws no power") {
    auto g = chain_graph(1e3, 1000);
    g.process("p").output_size = ScalarFunction::constant(0.0);
    g.links[1].energy_per_bit = 1.0;
    auto fa = propagate(g);
    CHECK(fa.edge("p->out").flow.rate == 1e3);
    CHECK(link_power(g, fa, "p->out") == 0.0);
    CHECK(required_channels(g.links[1], fa.edge("p->out").flow) == 0);
  }

  TEST_CASE("required channels") {
    CommLink l = make_link("a", "b", 0, 100e9);
    CHECK(required_channels(l, MessageFlow{1e9, 100, 0, 1e9}) == 1);
    CHECK(required_channels(l, MessageFlow{2.5e9, 100, 0, 2.5e9}) == 3);
    // 2.56e15 b/s over 10.24 Gb/s LpGBT channels: 2.56e15 / 10.24e9 = 250000.
    CommLink lp = make_link("a", "b", 22e-12, 10.24e9);
    CHECK(required_channels(lp, MessageFlow{40e6, 64e6, 0, 40e6}) == 250000);
  }

  TEST_CASE("total power never decreases with a sensor's sample rate") {
    auto g = chain_graph(1e3, 1000, 0.1);
    g.links[0].energy_per_bit = 1e-9;
    g.process("p").complexity = ScalarFunction::linear(1.0);
    g.process("p").energy_per_op = 1e-9;
    double last = 0;
    for (double rate : {1e2, 1e3, 1e4, 1e5}) {
      g.sensor("s").sample_rate = rate;
      double p = total_power(g, propagate(g));
      CHECK(p >= last);
      last = p;
    }
  }

  TEST_CASE("propagation is bit-identical across runs") {
    Model m = build_model(load_config(config_path("cms_run5_phase1.cfg")));
    auto g = apply_conditions(m.graph, m.scenario.conditions);
    CHECK(propagate(g) == propagate(g));
  }

  TEST_CASE("Run-3 detector output is 80 TB/s") {
    Model m = build_model(load_config(config_path("cms_run3.cfg")));
    auto fa = propagate(m.graph, m.scenario.conditions);
    const auto& readout = fa.node("readout").outgoing;
    CHECK(readout.size == 16e6);
    CHECK(readout.rate * readout.size == 6.4e14);  // 80e12 bytes/s
  }

  TEST_CASE("calibrated L1T and HLT draw 120 kW and 1.6 MW at the reference point") {
    Model m = build_model(load_config(config_path("cms_run3.cfg")));
    auto g = apply_conditions(m.graph, m.scenario.conditions.reference());
    auto fa = propagate(g);
    CHECK(node_power(g, fa, "l1t") == doctest::Approx(120e3).epsilon(1e-12));
    CHECK(node_power(g, fa, "hlt") == doctest::Approx(1.6e6).epsilon(1e-12));
  }

  TEST_CASE("topological order breaks ties by id") {
    PipelineGraph g;
    g.nodes.push_back(make_sensor("z", 1, 1));
    g.nodes.push_back(make_sensor("a", 1, 1));
    g.nodes.push_back(make_process("m"));
    g.nodes.push_back(OutputNode{"out"});
    g.links = {make_link("z", "m"), make_link("a", "m"), make_link("m", "out")};
    auto order = topological_order(g);
    REQUIRE(order.size() == 4);
    CHECK(node_id(g.nodes[order[0]]) == "a");
    CHECK(node_id(g.nodes[order[1]]) == "z");
  }

  TEST_CASE("stream merges add rates") {
    PipelineGraph g;
    g.nodes.push_back(make_sensor("a", 1e3, 10, 0.5));
    g.nodes.push_back(make_sensor("b", 3e3, 30, 0.0));
    ProcessNode m = make_process("m");
    m.merge = MergeMode::stream;
    g.nodes.push_back(m);
    g.nodes.push_back(OutputNode{"out"});
    g.links = {make_link("a", "m"), make_link("b", "m"), make_link("m", "out")};
    auto fa = propagate(g);
    const auto& f = fa.node("m").incoming;
    CHECK(f.rate == 4e3);
    CHECK(f.size == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(f.n_true == 500.0);
    CHECK(fa.storage_rate == doctest::Approx(1e4 + 9e4).epsilon(1e-15));
  }
}
