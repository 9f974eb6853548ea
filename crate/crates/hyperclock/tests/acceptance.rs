//! Acceptance gates for the verification pipeline, one test per criterion.
//!
//! Each test prints a single `criterion N: pass` line on success (visible
//! with `--nocapture`); the harness line per test is the machine-readable
//! outcome. Randomness is seeded (override with `HYPERCLOCK_SEED`).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hyperclock::automaton::{
    decode_flow, encode_flow, Edge, Execution, Flow, MonadicPredicate, Segment, TimedAutomaton,
};
use hyperclock::engine::{
    cross_check_mso, enumerate_point_runs, enumerate_runs, replay_witness, verify, verify_point,
    GridBudget, Route, VerdictKind,
};
use hyperclock::formula::{parse_fragment, HcmtlFormula, PathVar};
use hyperclock::mso::{
    emit_automaton_formula, eval_mso, monadic_predicates, predicate_name, MsoFlow, MsoFormula,
    SoBudget,
};
use hyperclock::pointwise::{build_interval_automaton, chi, PointEdge, PointTimedAutomaton};
use hyperclock::semantics::{sat_interval, sat_point, Anchor, NoRuns};
use hyperclock::timecore::{ClockConstraint, Interval, Rational, Rel, TimeBound};

fn seed() -> u64 {
    std::env::var("HYPERCLOCK_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0xC10C_5EED)
}

fn ca(clock: &str, rel: Rel, c: i64) -> ClockConstraint {
    ClockConstraint::atom(clock, rel, Rational::int(c)).expect("non-negative constant")
}

/// Random interval automaton with integer constants ≤ 3, ≤ 4 states, and
/// ≤ 2 clocks. Every state carries an upper bound on `x` and every edge an
/// equality guard on `x`, so grid enumeration stays small.
fn random_automaton(rng: &mut ChaCha8Rng) -> TimedAutomaton {
    let ns = rng.gen_range(2..=4usize);
    let states: Vec<String> = (0..ns).map(|i| format!("s{i}")).collect();
    let nclocks = rng.gen_range(1..=2usize);
    let clocks: Vec<String> = ["x", "y"][..nclocks].iter().map(|s| s.to_string()).collect();
    let mut labels = BTreeMap::new();
    for s in &states {
        let mut l = BTreeSet::new();
        if rng.gen_bool(0.6) {
            l.insert("p".to_string());
        }
        if rng.gen_bool(0.4) {
            l.insert("q".to_string());
        }
        labels.insert(s.clone(), l);
    }
    let mut state_constraints = BTreeMap::new();
    for s in &states {
        let c = rng.gen_range(1..=3);
        let rel = if rng.gen_bool(0.5) { Rel::Lt } else { Rel::Le };
        let mut per = BTreeMap::new();
        per.insert("x".to_string(), ca("x", rel, c));
        state_constraints.insert(s.clone(), per);
    }
    let nedges = rng.gen_range(1..=4usize);
    let mut edges = Vec::new();
    for _ in 0..nedges {
        let from = states[rng.gen_range(0..ns)].clone();
        let to = states[rng.gen_range(0..ns)].clone();
        let mut guards = vec![ca("x", Rel::Eq, rng.gen_range(0..=3))];
        if nclocks == 2 && rng.gen_bool(0.3) {
            guards.push(ca("y", Rel::Le, rng.gen_range(0..=3)));
        }
        let mut resets = BTreeSet::new();
        if rng.gen_bool(0.5) {
            resets.insert("x".to_string());
        }
        if nclocks == 2 && rng.gen_bool(0.5) {
            resets.insert("y".to_string());
        }
        edges.push(Edge { from, to, guards, resets });
    }
    let mut initial: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if initial.is_empty() {
        initial.push(states[0].clone());
    }
    let mut final_states: Vec<String> =
        states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if final_states.is_empty() {
        final_states.push(states[ns - 1].clone());
    }
    TimedAutomaton {
        propositions: vec!["p".to_string(), "q".to_string()],
        states,
        initial,
        labels,
        clocks,
        state_constraints,
        edges,
        final_states,
    }
}

/// Population for the encoding criteria: ≥ 10 automata with ≥ 1000 accepting
/// executions total at grid 1/4, horizon 5, ≤ 4 transitions.
fn run_population(rng: &mut ChaCha8Rng) -> Vec<(TimedAutomaton, Vec<Execution>)> {
    let budget = GridBudget {
        granularity: 4,
        max_transitions: 4,
        horizon: Rational::int(5),
    };
    let mut pool = Vec::new();
    let mut total = 0usize;
    for _ in 0..600 {
        let a = random_automaton(rng);
        if a.validate().is_err() {
            continue;
        }
        let mut runs = enumerate_runs(&a, &budget, None);
        if runs.len() < 5 {
            continue;
        }
        runs.truncate(150);
        total += runs.len();
        pool.push((a, runs));
        if pool.len() >= 10 && total >= 1000 {
            break;
        }
    }
    assert!(
        pool.len() >= 10 && total >= 1000,
        "population too small: {} automata, {} runs",
        pool.len(),
        total
    );
    pool
}

fn random_interval(rng: &mut ChaCha8Rng, allow_inf: bool) -> Interval {
    let a = rng.gen_range(0..=2i64);
    if allow_inf && rng.gen_bool(0.2) {
        return Interval::new(Rational::int(a), TimeBound::Infinity, rng.gen_bool(0.7), false)
            .expect("half-open unbounded interval");
    }
    let b = rng.gen_range(a..=3i64);
    if a == b {
        return Interval::singular(Rational::int(a));
    }
    Interval::new(
        Rational::int(a),
        TimeBound::Finite(Rational::int(b)),
        rng.gen_bool(0.7),
        rng.gen_bool(0.7),
    )
    .expect("nonempty interval")
}

/// Random quantifier-free formula over the given variables and propositions
/// with temporal nesting at most `depth`. With `dual_safe`, until is not
/// generated: its negation rewrite `G_I ¬φ2 ∨ (¬φ2 U_[0,R(I)) ¬φ1)` is not a
/// true dual over dense time (see the recorded counterexamples in the
/// semantics unit tests), while the F, G, and Boolean duals are exact.
fn random_qf_with(
    rng: &mut ChaCha8Rng,
    vars: &[PathVar],
    props: &[&str],
    depth: usize,
    allow_inf: bool,
    dual_safe: bool,
) -> HcmtlFormula {
    let atom = |rng: &mut ChaCha8Rng| {
        let p = props[rng.gen_range(0..props.len())].to_string();
        let v = vars[rng.gen_range(0..vars.len())].clone();
        if rng.gen_bool(0.5) {
            HcmtlFormula::Atom(p, v)
        } else {
            HcmtlFormula::NegAtom(p, v)
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return atom(rng);
    }
    let sub =
        |rng: &mut ChaCha8Rng| random_qf_with(rng, vars, props, depth - 1, allow_inf, dual_safe);
    let arms = if dual_safe { 4 } else { 5 };
    match rng.gen_range(0..arms) {
        0 => {
            let (a, b) = (sub(rng), sub(rng));
            HcmtlFormula::and(a, b)
        }
        1 => {
            let (a, b) = (sub(rng), sub(rng));
            HcmtlFormula::or(a, b)
        }
        2 => {
            let i = random_interval(rng, allow_inf);
            HcmtlFormula::Finally(i, Box::new(sub(rng)))
        }
        3 => {
            let i = random_interval(rng, allow_inf);
            HcmtlFormula::Globally(i, Box::new(sub(rng)))
        }
        _ => {
            let i = random_interval(rng, allow_inf);
            let (a, b) = (sub(rng), sub(rng));
            HcmtlFormula::Until(i, Box::new(a), Box::new(b))
        }
    }
}

fn random_qf(
    rng: &mut ChaCha8Rng,
    vars: &[PathVar],
    props: &[&str],
    depth: usize,
    allow_inf: bool,
) -> HcmtlFormula {
    random_qf_with(rng, vars, props, depth, allow_inf, false)
}

#[test]
fn criterion_1_flow_encoding_round_trip() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 1);
    let pool = run_population(&mut rng);
    let horizon = TimeBound::Finite(Rational::int(5));
    let mut total = 0usize;
    for (a, runs) in &pool {
        let mut distinct = BTreeSet::new();
        for rho in runs {
            let flow = encode_flow(a, rho, horizon.clone()).expect("encoding accepting run");
            let back = decode_flow(a, &flow).expect("decoding an encoded run");
            assert_eq!(&back, rho, "decode ∘ encode must be the identity");
            distinct.insert(format!("{flow:?}"));
            total += 1;
        }
        assert_eq!(distinct.len(), runs.len(), "distinct runs map to distinct flows");
    }
    assert!(total >= 1000, "only {total} round trips");
    assert!(pool.len() >= 10);
    assert!(started.elapsed() < Duration::from_secs(60), "took {:?}", started.elapsed());
    println!("criterion 1 (encode/decode round trip, {total} runs): pass");
}

#[test]
fn criterion_2_automaton_formula_accepts_every_encoded_run() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 1);
    let pool = run_population(&mut rng);
    let horizon = TimeBound::Finite(Rational::int(5));
    let so = SoBudget { granularity: 4, max_segments: 5 };
    let mut total = 0usize;
    for (a, runs) in &pool {
        let phi_a = emit_automaton_formula(a, None).expect("automaton compiles");
        let ok = runs
            .par_iter()
            .map(|rho| {
                let flow = encode_flow(a, rho, horizon.clone()).expect("encoding");
                let mso_flow = MsoFlow::from_flow(&flow, None).expect("finite horizon");
                eval_mso(&mso_flow, &BTreeMap::new(), &phi_a, &so).expect("evaluation")
            })
            .all(|b| b);
        assert!(ok, "an encoded accepting run was rejected by the automaton formula");
        total += runs.len();
    }
    assert!(total >= 1000);
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
    println!("criterion 2 (automaton formula accepts encodings, {total} runs): pass");
}

#[test]
fn criterion_3_filtered_flows_decode_and_reencode() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 3);
    let pool = run_population(&mut rng);
    let horizon = TimeBound::Finite(Rational::int(5));
    let so = SoBudget { granularity: 4, max_segments: 5 };
    let mut passing = 0usize;
    for (a, runs) in pool.iter().take(12) {
        let phi_a = emit_automaton_formula(a, None).expect("automaton compiles");
        let alphabet: Vec<MonadicPredicate> = monadic_predicates(a)
            .into_iter()
            .filter(|mp| !matches!(mp, MonadicPredicate::Mark))
            .collect();
        let mut flows: Vec<Flow> = Vec::new();
        for rho in runs.iter().take(30) {
            let flow = encode_flow(a, rho, horizon.clone()).expect("encoding");
            let mut pieces: Vec<_> = flow
                .segments
                .iter()
                .map(|s| (s.interval.clone(), s.predicates.clone()))
                .collect();
            let si = rng.gen_range(0..pieces.len());
            let mp = alphabet[rng.gen_range(0..alphabet.len())].clone();
            if !pieces[si].1.remove(&mp) {
                pieces[si].1.insert(mp);
            }
            // Rebuild so the mutant is still in canonical form (no stored
            // empty-valued segments).
            let mutated = Flow::new(horizon.clone(), pieces).expect("disjoint pieces");
            flows.push(flow);
            flows.push(mutated);
        }
        let accepted: Vec<&Flow> = flows
            .par_iter()
            .filter(|flow| {
                let mso_flow = MsoFlow::from_flow(flow, None).expect("finite horizon");
                eval_mso(&mso_flow, &BTreeMap::new(), &phi_a, &so).expect("evaluation")
            })
            .collect();
        for flow in accepted {
            let rho = decode_flow(a, flow)
                .expect("a flow accepted by the automaton formula must decode");
            assert!(rho.validate(a).is_empty());
            assert!(rho.is_accepting(a));
            let again = encode_flow(a, &rho, horizon.clone()).expect("re-encoding");
            assert_eq!(&again, flow, "re-encoding must reproduce the accepted flow");
            passing += 1;
        }
    }
    assert!(passing >= 200, "only {passing} flows passed the filter");
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
    println!("criterion 3 (filtered flows decode exactly, {passing} flows): pass");
}

#[test]
fn criterion_4_quantifier_free_translation_agrees() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 4);
    let budget = GridBudget {
        granularity: 1,
        max_transitions: 2,
        horizon: Rational::int(4),
    };
    let vars = [PathVar("p1".to_string()), PathVar("p2".to_string())];
    let mut automata = Vec::new();
    while automata.len() < 8 {
        let a = random_automaton(&mut rng);
        if a.validate().is_ok() && !enumerate_runs(&a, &budget, None).is_empty() {
            automata.push(a);
        }
    }
    let mut samples = 0usize;
    let mut formulas = 0usize;
    while samples < 500 {
        let a = &automata[rng.gen_range(0..automata.len())];
        let phi = random_qf(&mut rng, &vars, &["p", "q"], 3, true);
        let report = cross_check_mso(a, &phi, &budget, 12, rng.gen())
            .expect("cross-check instance");
        assert!(
            report.disagreements.is_empty(),
            "translation disagreed on {phi}: {:?}",
            report.disagreements
        );
        samples += report.samples;
        formulas += 1;
    }
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
    println!(
        "criterion 4 (quantifier-free translation agreement, {samples} instances / {formulas} formulas): pass"
    );
}

/// Random point automaton: ≤ 3 states, one clock, single-clock guards.
fn random_point_automaton(rng: &mut ChaCha8Rng) -> PointTimedAutomaton {
    let ns = rng.gen_range(2..=3usize);
    let states: Vec<String> = (0..ns).map(|i| format!("t{i}")).collect();
    let nt = rng.gen_range(2..=4usize);
    let mut transitions = Vec::new();
    for _ in 0..nt {
        let from = states[rng.gen_range(0..ns)].clone();
        let to = states[rng.gen_range(0..ns)].clone();
        let mut event = BTreeSet::new();
        if rng.gen_bool(0.7) {
            event.insert("p".to_string());
        }
        if rng.gen_bool(0.4) {
            event.insert("q".to_string());
        }
        let rel = [Rel::Ge, Rel::Le, Rel::Eq][rng.gen_range(0..3)];
        let guards = vec![ca("x", rel, rng.gen_range(0..=2))];
        let mut resets = BTreeSet::new();
        if rng.gen_bool(0.4) {
            resets.insert("x".to_string());
        }
        transitions.push(PointEdge { from, event, guards, resets, to });
    }
    let mut final_states: Vec<String> =
        states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if final_states.is_empty() {
        final_states.push(states[rng.gen_range(0..ns)].clone());
    }
    PointTimedAutomaton {
        propositions: vec!["p".to_string(), "q".to_string()],
        states: states.clone(),
        start: states[0].clone(),
        clocks: vec!["x".to_string()],
        transitions,
        final_states,
    }
}

fn random_point_sentence(rng: &mut ChaCha8Rng) -> HcmtlFormula {
    let v1 = PathVar("q1".to_string());
    let v2 = PathVar("q2".to_string());
    let two = rng.gen_bool(0.5);
    let vars: Vec<PathVar> = if two { vec![v1.clone(), v2.clone()] } else { vec![v1.clone()] };
    let body = random_qf(rng, &vars, &["p", "q"], 2, false);
    let quantify = |v: PathVar, f: HcmtlFormula, rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            HcmtlFormula::Exists(v, Box::new(f))
        } else {
            HcmtlFormula::Forall(v, Box::new(f))
        }
    };
    let inner = if two { quantify(v2, body, rng) } else { body };
    quantify(v1, inner, rng)
}

#[test]
fn criterion_5_point_routes_and_simulation_agree() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 5);
    let budget = GridBudget {
        granularity: 1,
        max_transitions: 2,
        horizon: Rational::int(3),
    };
    let horizon = TimeBound::Finite(Rational::int(3));

    // Part 1: the reduce route is computed alongside the direct route inside
    // verify_point; any mismatch surfaces as an error.
    let mut automata = Vec::new();
    while automata.len() < 20 {
        let b = random_point_automaton(&mut rng);
        if b.validate().is_ok() && !enumerate_point_runs(&b, &budget, None).is_empty() {
            automata.push(b);
        }
    }
    let mut sentences = 0usize;
    while sentences < 300 {
        let b = &automata[rng.gen_range(0..automata.len())];
        let phi = random_point_sentence(&mut rng);
        verify_point(b, &phi, &budget, Route::Direct)
            .expect("direct and reduce routes must agree");
        sentences += 1;
    }

    // Part 2: the point semantics agrees with the interval semantics on the
    // image of the run bijection, probe by probe.
    let vars = [PathVar("q1".to_string()), PathVar("q2".to_string())];
    let grid: Vec<Rational> = (0..6).map(|i| Rational::new(i, 2)).collect();
    let mut probes = 0usize;
    while probes < 500 {
        let b = &automata[rng.gen_range(0..automata.len())];
        let runs = enumerate_point_runs(b, &budget, None);
        let a_int = build_interval_automaton(b);
        let phi = random_qf(&mut rng, &vars, &["p", "q"], 2, false);
        let used = phi.free_vars();
        let mut point_env = BTreeMap::new();
        let mut interval_env = BTreeMap::new();
        for v in &used {
            let eta = runs[rng.gen_range(0..runs.len())].clone();
            interval_env.insert(v.clone(), chi(b, &eta).expect("bijection image"));
            point_env.insert(v.clone(), eta);
        }
        let t = grid[rng.gen_range(0..grid.len())].clone();
        let anchor = if rng.gen_bool(0.5) {
            Anchor::Epsilon
        } else {
            Anchor::Var(used[rng.gen_range(0..used.len())].clone())
        };
        let direct = sat_point(b, &point_env, &t, &anchor, &phi, &horizon, &NoRuns)
            .expect("point evaluation");
        let phi_int = phi.point_to_interval(&used);
        let reduced = sat_interval(&a_int, &interval_env, &t, &anchor, &phi_int, &horizon, &NoRuns)
            .expect("interval evaluation");
        assert_eq!(direct, reduced, "probe disagreed on {phi} at {t}");
        probes += 1;
    }
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
    println!(
        "criterion 5 (point routes, {sentences} sentences; simulation probes, {probes}): pass"
    );
}

/// Unconstrained two-state automaton whose runs can span the whole horizon.
fn toggle_automaton() -> TimedAutomaton {
    serde_json::from_str(
        r#"{
            "propositions": ["p", "q"],
            "states": ["A", "B"],
            "initial": ["A", "B"],
            "labels": { "A": ["p"], "B": ["q"] },
            "clocks": ["x"],
            "edges": [
                { "from": "A", "to": "B", "guards": [], "resets": ["x"] },
                { "from": "B", "to": "A", "guards": [], "resets": ["x"] }
            ],
            "final": ["A", "B"]
        }"#,
    )
    .expect("fixture")
}

#[test]
fn criterion_6_negation_duality_on_full_span_environments() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 6);
    let a = toggle_automaton();
    a.validate().expect("fixture validates");
    let budget = GridBudget {
        granularity: 2,
        max_transitions: 3,
        horizon: Rational::int(2),
    };
    let horizon = TimeBound::Finite(Rational::int(2));
    let full_span: Vec<Execution> = enumerate_runs(&a, &budget, None)
        .into_iter()
        .filter(|rho| {
            let last = rho.segments.last().expect("nonempty run");
            last.interval.right() == &TimeBound::Finite(Rational::int(2))
                && !last.interval.right_closed()
        })
        .collect();
    assert!(full_span.len() >= 4, "need a pool of full-span runs");
    let vars = [PathVar("p1".to_string()), PathVar("p2".to_string())];
    let times: Vec<Rational> = (0..4).map(|i| Rational::new(i, 2)).collect();
    for probe in 0..500 {
        let phi = random_qf_with(&mut rng, &vars, &["p", "q"], 2, true, true);
        let used = phi.free_vars();
        let mut env = BTreeMap::new();
        for v in &used {
            env.insert(v.clone(), full_span[rng.gen_range(0..full_span.len())].clone());
        }
        let t = times[rng.gen_range(0..times.len())].clone();
        let anchor = if rng.gen_bool(0.5) {
            Anchor::Epsilon
        } else {
            Anchor::Var(used[rng.gen_range(0..used.len())].clone())
        };
        let pos = sat_interval(&a, &env, &t, &anchor, &phi, &horizon, &NoRuns).expect("eval");
        let neg =
            sat_interval(&a, &env, &t, &anchor, &phi.negate(), &horizon, &NoRuns).expect("eval");
        assert!(
            pos ^ neg,
            "probe {probe}: duality failed on {phi} at {t} (sat={pos}, sat-negation={neg})"
        );
    }
    assert!(started.elapsed() < Duration::from_secs(120), "took {:?}", started.elapsed());
    println!("criterion 6 (negation duality, 500 full-span probes): pass");
}

/// Random first-order body with `x` free: a boolean combination of predicate
/// atoms at `x`, optionally probing one step ahead through the successor
/// relation.
fn random_fo_body(
    rng: &mut ChaCha8Rng,
    preds: &[String],
    depth: usize,
) -> MsoFormula {
    let atom = |rng: &mut ChaCha8Rng| {
        let p = preds[rng.gen_range(0..preds.len())].clone();
        if rng.gen_bool(0.3) {
            // ∃y (y = x + 1 ∧ P(y))
            MsoFormula::ExistsFO(
                "y".to_string(),
                Box::new(MsoFormula::not(MsoFormula::or(
                    MsoFormula::not(MsoFormula::plus_one("x", "y")),
                    MsoFormula::not(MsoFormula::pred(p, "y")),
                ))),
            )
        } else {
            MsoFormula::pred(p, "x")
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng);
    }
    match rng.gen_range(0..3) {
        0 => MsoFormula::or(
            random_fo_body(rng, preds, depth - 1),
            random_fo_body(rng, preds, depth - 1),
        ),
        1 => MsoFormula::not(random_fo_body(rng, preds, depth - 1)),
        _ => atom(rng),
    }
}

#[test]
fn criterion_7_critical_point_evaluation_matches_dense_probing() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 7);
    let pool = run_population(&mut rng);
    let horizon = TimeBound::Finite(Rational::int(5));
    let so = SoBudget { granularity: 4, max_segments: 5 };
    let mut instances = Vec::new();
    'outer: for (a, runs) in &pool {
        let preds: Vec<String> = monadic_predicates(a)
            .iter()
            .map(|mp| predicate_name(mp, None))
            .collect();
        for rho in runs.iter().take(5) {
            let flow = encode_flow(a, rho, horizon.clone()).expect("encoding");
            let mso_flow = MsoFlow::from_flow(&flow, None).expect("finite horizon");
            let body = random_fo_body(&mut rng, &preds, 2);
            let existential = rng.gen_bool(0.5);
            instances.push((mso_flow, body, existential));
            if instances.len() >= 110 {
                break 'outer;
            }
        }
    }
    assert!(instances.len() >= 100);
    // Dense probe times: random rationals in [0, 5) with denominators ≤ 64.
    let probes: Vec<Rational> = (0..10_000)
        .map(|_| {
            let den = rng.gen_range(1..=64i64);
            Rational::new(rng.gen_range(0..5 * den), den)
        })
        .collect();
    instances.par_iter().for_each(|(flow, body, existential)| {
        let quantified = if *existential {
            MsoFormula::ExistsFO("x".to_string(), Box::new(body.clone()))
        } else {
            MsoFormula::not(MsoFormula::ExistsFO(
                "x".to_string(),
                Box::new(MsoFormula::not(body.clone())),
            ))
        };
        let decided =
            eval_mso(flow, &BTreeMap::new(), &quantified, &so).expect("critical-point eval");
        for t in &probes {
            let mut interp = BTreeMap::new();
            interp.insert("x".to_string(), t.clone());
            let at_t = eval_mso(flow, &interp, body, &so).expect("probe eval");
            if *existential {
                assert!(
                    !(at_t && !decided),
                    "dense probe found a witness at {t} that the evaluator missed"
                );
            } else {
                assert!(
                    !(decided && !at_t),
                    "universal claim refuted by dense probe at {t}"
                );
            }
        }
    });
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
    println!(
        "criterion 7 (critical-point vs dense probing, {} instances x 10000 probes): pass",
        instances.len()
    );
}

#[derive(serde::Deserialize)]
struct CorpusIndexEntry {
    name: String,
    formula: String,
    budget: GridBudget,
    models: Vec<CorpusModel>,
}

#[derive(serde::Deserialize)]
struct CorpusModel {
    file: String,
    expected: String,
}

#[test]
fn criterion_8_security_corpus_verdicts_and_witnesses() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let index = std::fs::read_to_string(dir.join("index.json")).expect("corpus index");
    let entries: Vec<CorpusIndexEntry> = serde_json::from_str(&index).expect("index parses");
    assert_eq!(entries.len(), 7, "all seven properties are present");
    for entry in &entries {
        assert!(entry.budget.horizon <= Rational::int(10));
        assert!(entry.budget.granularity <= 4);
        assert!(entry.budget.max_transitions <= 6);
        let text = std::fs::read_to_string(dir.join(&entry.formula)).expect("formula file");
        let phi = parse_fragment(text.trim()).expect("formula parses");
        for model in &entry.models {
            let started = Instant::now();
            let raw = std::fs::read_to_string(dir.join(&model.file)).expect("model file");
            let a: TimedAutomaton = serde_json::from_str(&raw).expect("model parses");
            a.validate().expect("model validates");
            let verdict = verify(&a, &phi, &entry.budget).expect("verification runs");
            match model.expected.as_str() {
                "holdsOnGrid" => assert_eq!(
                    verdict.verdict,
                    VerdictKind::HoldsOnGrid,
                    "{}/{} must hold",
                    entry.name,
                    model.file
                ),
                "failsWithWitness" => {
                    assert_eq!(
                        verdict.verdict,
                        VerdictKind::FailsWithWitness,
                        "{}/{} must fail",
                        entry.name,
                        model.file
                    );
                    let witness = verdict.witness.as_ref().expect("witness is attached");
                    let confirmed = replay_witness(&a, &phi, witness, &entry.budget)
                        .expect("witness replays");
                    assert!(confirmed, "{}/{}: witness must refute the body", entry.name, model.file);
                }
                other => panic!("unknown expectation {other:?}"),
            }
            assert!(
                started.elapsed() < Duration::from_secs(120),
                "{}/{} took {:?}",
                entry.name,
                model.file,
                started.elapsed()
            );
        }
    }
    println!("criterion 8 (security corpus, 7 properties x compliant+mutant): pass");
}

#[test]
fn criterion_9_boundary_semantics_examples() {
    let a: TimedAutomaton = serde_json::from_str(
        r#"{
            "propositions": ["p"],
            "states": ["P", "Q"],
            "initial": ["P"],
            "labels": { "P": ["p"], "Q": [] },
            "edges": [ { "from": "P", "to": "Q", "guards": [], "resets": [] } ],
            "final": ["P", "Q"]
        }"#,
    )
    .expect("fixture");
    a.validate().expect("fixture validates");
    let horizon = TimeBound::Finite(Rational::int(3));
    let pi = PathVar("pi".to_string());
    let anchor = Anchor::Var(pi.clone());
    let zero = Rational::zero();

    // p holds only at t = 0; the strict-future F_[0,1] p is false at 0.
    let spike = Execution {
        segments: vec![
            Segment { state: "P".to_string(), interval: Interval::singular(zero.clone()) },
            Segment {
                state: "Q".to_string(),
                interval: Interval::new(
                    zero.clone(),
                    TimeBound::Finite(Rational::int(2)),
                    false,
                    true,
                )
                .expect("nonempty"),
            },
        ],
        transitions: vec![0],
    };
    assert!(spike.validate(&a).is_empty());
    let mut env = BTreeMap::new();
    env.insert(pi.clone(), spike);
    let p_now = HcmtlFormula::Atom("p".to_string(), pi.clone());
    assert!(
        sat_interval(&a, &env, &zero, &anchor, &p_now, &horizon, &NoRuns).expect("eval"),
        "p holds at 0"
    );
    let f_p = HcmtlFormula::Finally(
        Interval::closed(Rational::zero(), Rational::one()),
        Box::new(p_now.clone()),
    );
    assert!(
        !sat_interval(&a, &env, &zero, &anchor, &f_p, &horizon, &NoRuns).expect("eval"),
        "the eventuality is strict: a witness now does not count"
    );

    // Past the end of a run, an atom and its negation are both false.
    let short = Execution {
        segments: vec![Segment {
            state: "P".to_string(),
            interval: Interval::new(
                zero.clone(),
                TimeBound::Finite(Rational::one()),
                true,
                false,
            )
            .expect("nonempty"),
        }],
        transitions: vec![],
    };
    assert!(short.validate(&a).is_empty());
    let mut env = BTreeMap::new();
    env.insert(pi.clone(), short);
    let after_end = Rational::new(3, 2);
    let not_p = p_now.negate();
    assert!(
        !sat_interval(&a, &env, &after_end, &anchor, &p_now, &horizon, &NoRuns).expect("eval"),
        "atoms are false past the run's end"
    );
    assert!(
        !sat_interval(&a, &env, &after_end, &anchor, &not_p, &horizon, &NoRuns).expect("eval"),
        "negated atoms are false past the run's end too"
    );
    println!("criterion 9 (boundary semantics examples): pass");
}
