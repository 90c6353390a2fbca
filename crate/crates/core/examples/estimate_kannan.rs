//! Estimating the Kannan constant of the example map and checking it.

use pqmetric::prelude::*;

fn main() -> Result<()> {
    let space = builtin_space("paper_example")?;
    let map = named_mapping("example_map", &space)?;
    let strategy = CheckStrategy::sampled(100_000, 42);

    let est = estimate_lambda(&space, &map, &strategy)?;
    println!("estimated lambda: {:?}", est.lambda_hat());
    if let LambdaEstimate::Bounded { witness: Some([x, y]), .. } = &est {
        println!("attained at x = {x}, y = {y}");
    }

    for lambda in [0.1, 2.0 / 15.0, 0.2] {
        let report = check_kannan(&space, &map, KannanConstant::new(lambda)?, &strategy)?;
        println!("lambda = {lambda:.4}: {} violations", report.total_violations());
    }

    // consequences for the symmetrized distance
    let c = KannanConstant::new(2.0 / 15.0)?;
    print!("{}", check_lemma2(&space, &map, c, &strategy)?);
    println!("gamma = {}, rate = {}", c.gamma(), c.rate());
    Ok(())
}
