//! A Kannan map without a fixed point on the punctured space.

use pqmetric::prelude::*;

fn main() -> Result<()> {
    let space = builtin_space("paper_example_punctured")?;
    let seq = SequenceSpec::geometric(0.5, 256)?;
    let cmap = build_counterexample_map(&space, &seq)?;

    for x in [1e-6, 0.01, 0.3, 1.0, 50.0] {
        println!("T({x}) = {:?}", cmap.image(x));
    }

    let strategy = CheckStrategy::sampled(10_000, 42).with_upper_cap(1e3);
    let audit = audit_counterexample(&space, &cmap, &strategy)?;
    print!("{}", audit.report);
    println!("smallest p+(x, Tx): {}", audit.min_displacement);

    // the full space contains the limit 0, so the construction is refused
    let full = builtin_space("paper_example")?;
    if let Err(e) = build_counterexample_map(&full, &seq) {
        println!("on the full space: {e}");
    }
    Ok(())
}
