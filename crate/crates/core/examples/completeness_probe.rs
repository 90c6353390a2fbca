//! Cauchy and convergence verdicts for sequences, and completeness evidence.

use pqmetric::completeness::Notion;
use pqmetric::prelude::*;

fn main() -> Result<()> {
    for name in ["paper_example", "paper_example_punctured"] {
        let space = builtin_space(name)?;
        let candidates = default_candidates(&space);

        let seq = parse_sequence("geometric:0.5", 256)?;
        let c = classify_sequence(&space, &seq, &candidates, 1e-12)?;
        println!(
            "{name}: {} p+-Cauchy {} left p-Cauchy {} p-limit {:?}",
            c.sequence,
            c.tau_p_plus_cauchy.holds,
            c.left_p_cauchy.holds,
            c.tau_p_convergent_to.map(|p| p.to_string())
        );

        let report = probe_completeness(&space, &default_family(256)?, &candidates, 1e-12)?;
        for notion in Notion::ALL {
            let e = report.evidence(notion);
            println!("  {notion}: counterexample {:?}", e.counterexample);
        }
    }
    Ok(())
}
