//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

#[path = "../../core/tests/common/gen.rs"]
mod gen;

use penplan::compliance::{classify_event, AuthClass, OblStatus};
use penplan::dsl::parse_policy;
use penplan::ground::{ActionId, GroundDomain, GroundLiteral};
use penplan::penalty::{score_plan, ScoredPlan};
use penplan::planner::{best_plan, brute_force_best, enumerate_plans, PlanQuery};
use penplan::policy_eval::evaluate_state;
use penplan::transition::{initial_state, is_closed, simulate, successor, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

const BIN: &str = env!("CARGO_BIN_EXE_penplan");
const EXAMPLES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/examples");
const SEED: u64 = 0x5eed_2026;

const FIXTURES: [(&str, &str); 3] = [
    ("drone-mini", "drone-mini.prb"),
    ("drone-delivery", "drone-delivery.prb"),
    ("self-driving-car", "self-driving-car.prb"),
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn path(dir: &str, file: &str) -> String {
    format!("{EXAMPLES}/{dir}/{file}")
}

fn files(dir: &str, prb: &str) -> [String; 3] {
    [
        path(dir, &format!("{dir}.dom")),
        path(dir, &format!("{dir}.pol")),
        path(dir, prb),
    ]
}

fn fixture(dir: &str, prb: &str) -> PlanQuery {
    let [d, p, r] = files(dir, prb).map(|f| std::fs::read_to_string(f).unwrap());
    gen::Case {
        dom: d,
        pol: p,
        prb: r,
    }
    .query()
}

fn penplan(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("penplan runs")
}

fn names(q: &PlanQuery, p: &ScoredPlan) -> Vec<String> {
    p.actions()
        .iter()
        .map(|&a| q.domain.action(a).to_string())
        .collect()
}

fn ids(q: &PlanQuery, acts: &[&str]) -> Vec<ActionId> {
    acts.iter()
        .map(|a| {
            q.domain
                .resolve_action(&penplan::dsl::parse_action_term(a).unwrap())
                .unwrap()
        })
        .collect()
}

fn closed_states(dom: &GroundDomain) -> Vec<State> {
    let n = dom.fluent_count();
    (0..1u64 << n)
        .map(|b| State::from_bits(n, b))
        .filter(|s| is_closed(s, dom))
        .collect()
}

fn same_best(q: &PlanQuery) -> Result<(), String> {
    let fast = best_plan(q).map_err(|e| e.to_string())?;
    let slow = brute_force_best(q).map_err(|e| e.to_string())?;
    let view = |p: &Option<ScoredPlan>| {
        p.as_ref()
            .map(|p| (p.actions().to_vec(), p.total(), p.len()))
    };
    ensure!(
        view(&fast.best) == view(&slow.best),
        "planner {:?} vs oracle {:?}",
        view(&fast.best),
        view(&slow.best)
    );
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    for (dir, prb) in FIXTURES {
        same_best(&fixture(dir, prb)).map_err(|e| format!("{dir}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut with_plan = 0;
    for i in 0..50 {
        let c = gen::case(&mut rng);
        let q = c.query();
        let spec = parse_policy(&c.pol).unwrap();
        ensure!(
            q.domain.fluents().len() <= 6
                && q.domain.actions().len() <= 5
                && spec.strict_rules.len() + spec.defeasible_rules.len() <= 3
                && q.problem.horizon <= 5,
            "case {i} exceeds limits"
        );
        same_best(&q).map_err(|e| format!("case {i}: {e}\n{}\n{}\n{}", c.dom, c.pol, c.prb))?;
        with_plan += best_plan(&q).unwrap().best.is_some() as usize;
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "3 fixtures + 50 random cases agree ({with_plan} with a plan), {:.2}s",
        took.as_secs_f64()
    ))
}

fn drone_mini_goldens() -> Outcome {
    let q = fixture("drone-mini", "drone-mini.prb");
    let b = best_plan(&q).unwrap().best.ok_or("no plan at horizon 4")?;
    ensure!(
        b.len() == 4 && b.total() == 0,
        "horizon 4: {:?} total {}",
        names(&q, &b),
        b.total()
    );

    let [d, p, _] = files("drone-mini", "drone-mini.prb");
    let capped = penplan(&[
        "plan",
        &d,
        &path("drone-mini", "drone-mini-capped.pol"),
        &path("drone-mini", "drone-mini-h2.prb"),
    ]);
    ensure!(
        capped.status.code() == Some(3),
        "capped exit {:?}",
        capped.status.code()
    );

    let q = fixture("drone-mini", "drone-mini-h2-emergency.prb");
    let b = best_plan(&q).unwrap().best.ok_or("no emergency plan")?;
    ensure!(
        b.len() == 2 && b.total() == 3,
        "emergency: {:?} total {}",
        names(&q, &b),
        b.total()
    );

    let q = fixture("drone-mini", "drone-mini.prb");
    let s0 = initial_state(&q.problem, &q.domain).unwrap();
    let t = simulate(
        &s0,
        &ids(&q, &["ascend", "cruise(base, cust)", "drop"]),
        &q.domain,
    )
    .unwrap();
    let s = score_plan(&q.policy, &q.config, &t).unwrap();
    let viol: Vec<usize> = s
        .verdict()
        .steps
        .iter()
        .enumerate()
        .flat_map(|(i, ev)| ev.obl_violations.iter().map(move |_| i + 1))
        .collect();
    ensure!(
        s.total() == 1 && viol == [3],
        "check: total {} violations at {viol:?}",
        s.total()
    );

    let out = penplan(&[
        "check",
        &d,
        &p,
        &path("drone-mini", "drone-mini.prb"),
        "--plan",
        "ascend;cruise(base,cust);drop",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let steps = &v["result"]["plan"]["steps"];
    ensure!(
        v["result"]["plan"]["total"] == 1
            && steps[2]["step"] == 3
            && steps[2]["obl_violations"].as_array().map(Vec::len) == Some(1),
        "cli check: {v}"
    );
    Ok(
        "4-step/0, capped exit 3, emergency 2-step/3, check total 1 with violation at step 3"
            .into(),
    )
}

fn trichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut counts = [0usize; 3];
    for i in 0..1000 {
        let q = gen::case(&mut rng).query();
        let states = closed_states(&q.domain);
        let s = &states[rng.gen_range(0..states.len())];
        let a = ActionId(rng.gen_range(0..q.domain.actions().len() as u32));
        let v = evaluate_state(&q.policy, s).map_err(|e| format!("triple {i}: {e}"))?;
        let ev = classify_event(&q.policy, s, a).unwrap();
        let (forbidden, permitted) = v
            .auth_for(a)
            .map(|e| (e.entailed_not_permitted(), e.entailed_permitted()))
            .unwrap_or_default();
        let class = match (forbidden, permitted) {
            (true, _) => AuthClass::NonCompliant,
            (false, true) => AuthClass::Strong,
            (false, false) => AuthClass::Weak,
        };
        ensure!(
            ev.auth_class == class,
            "triple {i}: {:?} expected {class:?}",
            ev.auth_class
        );
        counts[ev.auth_class as usize] += 1;
        let expect_obl = v.obligations.keys().any(|d| (d.action == a) == d.refrain);
        let status = ev.obl_status();
        ensure!(
            (status == OblStatus::NonCompliant) == expect_obl,
            "triple {i}: obligation status {status:?}"
        );
    }
    Ok(format!(
        "1000 triples, 0 counterexamples (strong {}, weak {}, non_compliant {})",
        counts[0], counts[1], counts[2]
    ))
}

fn aggregate_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut queries: Vec<PlanQuery> = FIXTURES.iter().map(|(d, p)| fixture(d, p)).collect();
    queries.push(fixture("drone-mini", "drone-mini-h2-emergency.prb"));
    queries.push(fixture("self-driving-car", "self-driving-car-unbelted.prb"));
    queries.extend((0..100).map(|_| gen::case(&mut rng).query()));
    let mut plans = 0;
    for q in &queries {
        let mut all = enumerate_plans(q).unwrap();
        all.extend(best_plan(q).unwrap().best);
        all.extend(brute_force_best(q).unwrap().best);
        for p in &all {
            ensure!(
                p.total() == p.step_penalties().iter().sum::<u64>(),
                "total {} vs steps {:?}",
                p.total(),
                p.step_penalties()
            );
            if p.is_empty() {
                ensure!(p.total() == 0, "empty plan total {}", p.total());
            }
        }
        plans += all.len();
    }
    let q = fixture("drone-mini", "drone-mini.prb");
    let s0 = initial_state(&q.problem, &q.domain).unwrap();
    let empty = score_plan(
        &q.policy,
        &q.config,
        &simulate(&s0, &[], &q.domain).unwrap(),
    )
    .unwrap();
    ensure!(empty.total() == 0, "empty plan total {}", empty.total());
    Ok(format!(
        "{plans} scored plans, every total is the sum of its steps"
    ))
}

fn scale_enforcement() -> Outcome {
    let mut rejected = 0;
    for n in [0u64, 4, 5, 10, 255, 256, 1000, u64::MAX] {
        let rule = format!("rule r: -permitted(go). penalty r = {n}.");
        let default = format!("penalty default = {n}.");
        for text in [rule, default] {
            ensure!(parse_policy(&text).is_err(), "accepted: {text}");
            rejected += 1;
        }
    }
    for n in 1..=3 {
        let text = format!("rule r: -permitted(go). penalty r = {n}. penalty default = {n}.");
        ensure!(parse_policy(&text).is_ok(), "rejected: {text}");
    }
    let [d, p, r] = files("drone-mini", "drone-mini.prb");
    for bad in ["0", "4"] {
        let out = penplan(&["plan", &d, &p, &r, "--default-penalty", bad]);
        ensure!(
            out.status.code() != Some(0),
            "--default-penalty {bad} accepted"
        );
    }
    Ok(format!(
        "{rejected} out-of-range declarations rejected, 1..3 accepted"
    ))
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut pairs = 0;
    let mut raised_total = 0;
    while pairs < 200 {
        let q = gen::case(&mut rng).query();
        let plans = enumerate_plans(&q).unwrap();
        let ids: Vec<String> = q.policy.rules().iter().map(|r| r.id.rule.clone()).collect();
        if plans.is_empty() || ids.is_empty() {
            continue;
        }
        let plan = &plans[rng.gen_range(0..plans.len())];
        let s0 = initial_state(&q.problem, &q.domain).unwrap();
        let t = simulate(&s0, plan.actions(), &q.domain).unwrap();
        let before = score_plan(&q.policy, &q.config, &t).unwrap().total();
        let id = &ids[rng.gen_range(0..ids.len())];
        let mut cfg = q.config.clone();
        let level = cfg.rule_penalty(id).raised();
        cfg.rule_penalties.insert(id.clone(), level);
        let after = score_plan(&q.policy, &cfg, &t).unwrap().total();
        ensure!(after >= before, "raising {id}: {before} -> {after}");
        raised_total += (after > before) as usize;
        pairs += 1;
    }
    Ok(format!(
        "200 pairs, none lowered ({raised_total} strictly raised)"
    ))
}

fn determinism() -> Outcome {
    for (dir, prb) in FIXTURES {
        let [d, p, r] = files(dir, prb);
        let args = ["plan", d.as_str(), p.as_str(), r.as_str(), "--json"];
        let a = penplan(&args);
        let b = penplan(&args);
        ensure!(
            a.status.code() == Some(0),
            "{dir}: exit {:?}",
            a.status.code()
        );
        ensure!(a.stdout == b.stdout, "{dir}: outputs differ");
    }
    Ok("plan --json byte-identical across runs on all 3 fixtures".into())
}

fn self_driving_car() -> Outcome {
    let q = fixture("self-driving-car", "self-driving-car.prb");
    let s0 = initial_state(&q.problem, &q.domain).unwrap();
    let score = |acts: &[&str]| {
        let t = simulate(&s0, &ids(&q, acts), &q.domain).unwrap();
        score_plan(&q.policy, &q.config, &t).unwrap().total()
    };
    let red = score(&["drive(origin, destination)"]);
    let wait = score(&["wait", "drive(origin, destination)"]);
    ensure!(red == 3, "run-red-light total {red}");
    ensure!(wait == 0, "wait-then-go total {wait}");
    let best = best_plan(&q).unwrap().best.ok_or("no plan")?;
    ensure!(
        names(&q, &best) == ["wait", "drive(origin, destination)"],
        "best {:?}",
        names(&q, &best)
    );
    Ok("run-red-light 3, wait-then-go 0 and selected".into())
}

fn check_successor(dom: &GroundDomain, s: &State, a: ActionId, next: &State) -> Result<(), String> {
    let effects: Vec<GroundLiteral> = dom
        .dynamic_laws()
        .iter()
        .filter(|l| l.action == a && s.holds_all(&l.body))
        .flat_map(|l| l.effects.iter().copied())
        .collect();
    ensure!(next.len() == dom.fluent_count(), "incomplete state");
    for &e in &effects {
        ensure!(next.holds(e), "effect {} missing", dom.literal_display(e));
        ensure!(
            !effects.contains(&e.complement()),
            "contradictory effects accepted"
        );
    }
    for l in next.literals() {
        if s.holds(l) || effects.contains(&l) {
            continue;
        }
        let by_closure = dom
            .static_laws()
            .iter()
            .any(|law| law.head == l && next.holds_all(&law.body));
        ensure!(
            by_closure,
            "{} changed without a cause",
            dom.literal_display(l)
        );
    }
    ensure!(is_closed(next, dom), "successor not closed");
    Ok(())
}

fn transition_semantics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let fixtures: Vec<PlanQuery> = FIXTURES.iter().map(|(d, p)| fixture(d, p)).collect();
    let states: Vec<Vec<State>> = fixtures.iter().map(|q| closed_states(&q.domain)).collect();
    let mut pairs = 0;
    let mut attempts = 0;
    while pairs < 500 {
        attempts += 1;
        ensure!(attempts < 100_000, "too few executable pairs");
        let k = rng.gen_range(0..fixtures.len());
        let q = &fixtures[k];
        let s = &states[k][rng.gen_range(0..states[k].len())];
        let a = ActionId(rng.gen_range(0..q.domain.actions().len() as u32));
        let Ok(next) = successor(s, a, &q.domain) else {
            continue;
        };
        check_successor(&q.domain, s, a, &next)?;
        pairs += 1;
    }
    for (dir, prb) in FIXTURES {
        let q = fixture(dir, prb);
        let s0 = initial_state(&q.problem, &q.domain).unwrap();
        ensure!(is_closed(&s0, &q.domain), "{dir}: initial state not closed");
    }
    Ok(format!(
        "500 (state, action) pairs from {attempts} draws satisfy the frame property"
    ))
}

fn main() -> ExitCode {
    // silence the default hook; failures are reported by the lines below
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("drone-mini goldens", drone_mini_goldens),
        ("compliance trichotomy", trichotomy),
        ("aggregate sum", aggregate_sum),
        ("scale enforcement", scale_enforcement),
        ("monotonicity", monotonicity),
        ("determinism", determinism),
        ("self-driving-car golden", self_driving_car),
        ("transition semantics", transition_semantics),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match r {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
