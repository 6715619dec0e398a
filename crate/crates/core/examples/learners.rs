//! ERM next to the two recursive proper learners on a hard class.
//!
//! cargo run --example learners

use hellylab::concept_class::{generate_class, ClassFamily, LabeledSample};
use hellylab::learners::{algorithm_a, algorithm_a_erm, erm};
use hellylab::parameters::{dual_helly_number, SearchCaps};
use hellylab::simulation::trial_rng;
use rand::Rng;

fn main() -> hellylab::Result<()> {
    let class = generate_class(&ClassFamily::Hard { d: 2, k_w: 4 })?;
    let k = dual_helly_number(&class, &SearchCaps::default())?;
    let mut rng = trial_rng(1, 0);
    let target = rng.gen_range(0..class.len());
    let points: Vec<usize> = (0..20)
        .map(|_| rng.gen_range(0..class.domain_size()))
        .collect();
    let s = LabeledSample::labeled_by(&class, target, &points);
    let t = LabeledSample::labeled_by(&class, target, &points[..2]);

    println!(
        "class: {} points, {} hypotheses, k_w = {k}",
        class.domain_size(),
        class.len()
    );
    println!("target          {target}");
    println!("ERM             {}", erm(&class, &s)?);
    println!("A_ERM           {}", algorithm_a_erm(&class, &s, k)?);
    for seed in 0..3 {
        let h = algorithm_a(&class, &s, &t, k, seed)?;
        println!(
            "A (seed {seed})     {h}  correct on T: {}",
            class.agrees(h, &t)
        );
    }
    Ok(())
}
