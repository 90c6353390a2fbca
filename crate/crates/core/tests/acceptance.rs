//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pqmetric::axioms::PointSampler;
use pqmetric::completeness::{Notion, SequenceKind};
use pqmetric::prelude::*;
use pqmetric::spaces::{BUILTIN_SPACES, PAPER_EXAMPLE, PAPER_EXAMPLE_PUNCTURED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const RANDOM_SPACES: usize = 50;

type Criterion<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn random_spaces() -> Vec<Space> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(99);
    (0..RANDOM_SPACES).map(|i| random_valid_space(&mut rng, 2 + i % 4)).collect()
}

fn example_lambda() -> f64 {
    2.0 / 15.0
}

fn criterion_1() -> Result<Outcome> {
    let space = builtin_space(PAPER_EXAMPLE)?;
    let map = Mapping::ExampleMap;
    let strategy = CheckStrategy::sampled(100_000, SEED);
    let est = estimate_lambda(&space, &map, &strategy)?;
    let lambda_hat = est.lambda_hat().unwrap_or(f64::INFINITY);
    let check = check_kannan(&space, &map, KannanConstant::new(example_lambda())?, &strategy)?;
    Ok(outcome(
        lambda_hat <= example_lambda() + 1e-9 && check.passed(),
        format!("lambda_hat = {lambda_hat}, violations at 2/15 = {}", check.total_violations()),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let space = builtin_space(PAPER_EXAMPLE)?;
    let map = Mapping::ExampleMap;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let starts: Vec<Point> = (0..100).map(|_| Point::Coord(rng.gen_range(0.0..=1e6))).collect();
    let mut bad = 0;
    for &s in &starts {
        let (_, r) = iterate(&space, &map, s, 1e-12, 1_000_000)?;
        if r.point != Point::Coord(0.0) || r.residual > 1e-12 || r.self_distance != 0.0 {
            bad += 1;
        }
    }
    let probe = uniqueness_probe(&space, &map, &starts, 1e-12, 1_000_000)?;
    Ok(outcome(
        bad == 0 && probe.passed,
        format!("{bad} of 100 starts off target, uniqueness spread {:e}", probe.max_spread),
    ))
}

fn criterion_3(spaces: &[Space]) -> Result<Outcome> {
    let exact = CheckStrategy::exhaustive().with_slack(0.0);
    let (mut maps, mut violations, mut failures) = (0usize, 0usize, 0usize);
    for space in spaces {
        for map in enumerate_self_maps(space, 8)? {
            let Some(l) = min_kannan_constant(space, &map)?.lambda().filter(|&l| l < 0.25) else {
                continue;
            };
            maps += 1;
            match check_lemma2(space, &map, KannanConstant::new(l)?, &exact) {
                Ok(r) => violations += r.total_violations(),
                Err(Error::Dependency { .. }) => failures += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(outcome(
        maps > 0 && violations == 0 && failures == 0,
        format!("{maps} Kannan maps, {violations} violations, {failures} dependency failures"),
    ))
}

fn criterion_4(spaces: &[Space]) -> Result<Outcome> {
    let (mut kannan, mut violations) = (0, 0);
    for space in spaces {
        let audit = exhaustive_kannan_audit(space, 8)?;
        kannan += audit.kannan_maps.len();
        violations += audit.violations.len();
    }
    Ok(outcome(violations == 0, format!("{kannan} Kannan maps, {violations} violations")))
}

fn criterion_5() -> Result<Outcome> {
    let space = builtin_space(PAPER_EXAMPLE_PUNCTURED)?;
    let cmap = build_counterexample_map(&space, &SequenceSpec::geometric(0.5, 256)?)?;
    let strategy = CheckStrategy::sampled(10_000, SEED).with_upper_cap(1e3);
    let audit = audit_counterexample(&space, &cmap, &strategy)?;
    Ok(outcome(
        audit.passed(),
        format!(
            "{} violations, min p+(x, Tx) = {:e}",
            audit.report.total_violations(),
            audit.min_displacement
        ),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let family = default_family(256)?;
    let full = builtin_space(PAPER_EXAMPLE)?;
    let on_full = probe_completeness(&full, &family, &default_candidates(&full), 1e-12)?;
    let clean = Notion::ALL.iter().all(|&n| !on_full.counterexample_found(n));

    let punct = builtin_space(PAPER_EXAMPLE_PUNCTURED)?;
    let on_punct = probe_completeness(&punct, &family, &default_candidates(&punct), 1e-12)?;
    let geometric_half = family
        .iter()
        .find(|s| matches!(s.kind(), SequenceKind::Geometric { ratio } if *ratio == 0.5))
        .map(|s| s.name().to_string());
    let found = on_punct.evidence(Notion::PSequential).counterexample == geometric_half
        && on_punct
            .sequences
            .iter()
            .any(|c| Some(&c.sequence) == geometric_half.as_ref() && c.tau_p_plus_cauchy.holds && c.tau_p_convergent_to.is_none());
    Ok(outcome(
        clean && found,
        format!(
            "full space counterexample-free: {clean}, punctured counterexample: {:?}",
            on_punct.evidence(Notion::PSequential).counterexample
        ),
    ))
}

/// `p <= p+` and `p+` symmetric, compared exactly on the given pairs.
fn invariant_breaks(space: &Space, pairs: &[(Point, Point)]) -> Result<usize> {
    let mut breaks = 0;
    for &(x, y) in pairs {
        let plus = space.sym_distance(x, y)?;
        if space.distance(x, y)? > plus || plus != space.sym_distance(y, x)? {
            breaks += 1;
        }
    }
    Ok(breaks)
}

fn criterion_7(spaces: &[Space]) -> Result<Outcome> {
    let mut failed_builtins = Vec::new();
    let mut breaks = 0;
    for name in BUILTIN_SPACES {
        let space = builtin_space(name)?;
        let strategy = CheckStrategy::sampled(10_000, SEED);
        match check_derived_lemma(&space, &strategy) {
            Ok(r) if r.passed() => {}
            Ok(_) => failed_builtins.push(format!("{name} (derived checks)")),
            Err(Error::Precondition(msg)) => failed_builtins.push(format!("{name} ({msg})")),
            Err(e) => return Err(e),
        }
        let mut sampler = PointSampler::new(&space, &strategy, 31)?;
        let pairs: Vec<_> = (0..10_000).map(|_| (sampler.sample(), sampler.sample())).collect();
        breaks += invariant_breaks(&space, &pairs)?;
    }
    let exact = CheckStrategy::exhaustive().with_slack(0.0);
    let mut failed_random = 0;
    for space in spaces {
        if !check_derived_lemma(space, &exact)?.passed() {
            failed_random += 1;
        }
        let pts = space.points();
        let pairs: Vec<_> = pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect();
        breaks += invariant_breaks(space, &pairs)?;
    }
    let mut detail = format!("random spaces failing: {failed_random}/{RANDOM_SPACES}, invariant breaks: {breaks}");
    if !failed_builtins.is_empty() {
        detail += &format!(", built-ins failing: {}", failed_builtins.join("; "));
    }
    Ok(outcome(failed_builtins.is_empty() && failed_random == 0 && breaks == 0, detail))
}

fn criterion_8() -> Result<Outcome> {
    let space = builtin_space(PAPER_EXAMPLE)?;
    let constant = KannanConstant::new(example_lambda())?;
    let mut all = true;
    let mut shown = Vec::new();
    for start in [64.0, 1e6] {
        let (trace, _) = iterate(&space, &Mapping::ExampleMap, Point::Coord(start), 1e-12, 1_000_000)?;
        all &= rate_bound_check(&trace, constant, 1e-12)?;
        shown.push(format!("start {start}: {} steps", trace.steps.len()));
    }
    Ok(outcome(all, format!("r = {}, {}", constant.rate(), shown.join(", "))))
}

fn main() -> ExitCode {
    let spaces = random_spaces();
    let criteria: Vec<(&str, u64, Criterion)> = vec![
        ("1 example map is Kannan with 2/15", 5, Box::new(criterion_1)),
        ("2 iteration reaches the unique fixed point", 1, Box::new(criterion_2)),
        ("3 symmetrized Kannan bounds on random spaces", 60, Box::new(|| criterion_3(&spaces))),
        ("4 exhaustive fixed-point oracle", 60, Box::new(|| criterion_4(&spaces))),
        ("5 fixed-point-free map on the punctured space", 5, Box::new(criterion_5)),
        ("6 completeness evidence", 2, Box::new(criterion_6)),
        ("7 conjugate and symmetrization structure", 30, Box::new(|| criterion_7(&spaces))),
        ("8 geometric rate bound", 1, Box::new(criterion_8)),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (ok, detail) = match result {
            Ok(o) => (o.ok && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.3}s / {limit}s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
