//! Axiom checks and structure classification for a few small spaces.

use pqmetric::prelude::*;

fn main() -> Result<()> {
    let spaces = [
        ("quasi-metric", vec![vec![0.0, 1.0], vec![3.0, 0.0]]),
        ("partial metric", vec![vec![1.0, 2.0], vec![2.0, 1.5]]),
        ("partial quasi-metric", vec![vec![1.0, 2.0], vec![4.0, 2.0]]),
        ("lopsided", vec![vec![2.0, 3.0], vec![1.0, 0.0]]),
        ("broken triangle", vec![vec![0.0, 1.0, 9.0], vec![1.0, 0.0, 1.0], vec![9.0, 1.0, 0.0]]),
    ];
    let exact = CheckStrategy::exhaustive().with_slack(0.0);
    for (name, m) in spaces {
        let space = Space::from_matrix(m)?.with_label(name);
        let class = classify_structure(&space, &exact)?;
        println!("{name:<22} -> {}", class.structure);
        match check_derived_lemma(&space, &exact) {
            Ok(r) => println!("{:<22}    conjugate and p+ checks pass: {}", "", r.passed()),
            Err(e) => println!("{:<22}    {e}", ""),
        }
    }

    // the analytic example space is sampled rather than enumerated
    let example = builtin_space("paper_example")?;
    let class = classify_structure(&example, &CheckStrategy::sampled(5_000, 1))?;
    print!("{}", class.report);
    println!("structure: {}", class.structure);
    let plus = check_partial_metric(&example.symmetrize(), &CheckStrategy::sampled(5_000, 1))?;
    println!("p+ of the example is a partial metric: {}", plus.passed());
    Ok(())
}
