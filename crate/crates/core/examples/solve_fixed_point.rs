//! Picard iteration on the example space, for the built-in map and a custom one.

use pqmetric::prelude::*;

fn main() -> Result<()> {
    let space = builtin_space("paper_example")?;
    let map = Mapping::ExampleMap;

    let (trace, result) = iterate(&space, &map, Point::Coord(64.0), 1e-12, 1_000)?;
    print!("{}", trace.to_delimited());
    println!(
        "fixed point {} after {} iterations, residual {}",
        result.point, result.iterations, result.residual
    );

    let c = KannanConstant::new(2.0 / 15.0)?;
    let (long, _) = iterate(&space, &map, Point::Coord(1e6), 1e-12, 1_000)?;
    println!("rate bound r = {} holds: {}", c.rate(), rate_bound_check(&long, c, 1e-12)?);

    let starts: Vec<Point> = [0.0, 0.5, 3.0, 1e3, 1e6].into_iter().map(Point::Coord).collect();
    let probe = uniqueness_probe(&space, &map, &starts, 1e-12, 1_000)?;
    println!("unique fixed point across {} starts: {}", starts.len(), probe.passed);

    // a halving map contracts in p+ but leaves a positive self-distance in
    // the tail, so it only reaches 0 approximately
    let halve = Mapping::custom("halve", |p| Point::Coord(p.coord().unwrap() / 2.0));
    match iterate(&space, &halve, Point::Coord(10.0), 1e-9, 200) {
        Ok((_, r)) => println!("halving map: {} after {} iterations", r.point, r.iterations),
        Err(e) => println!("halving map: {e}"),
    }
    Ok(())
}
