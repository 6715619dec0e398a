//! Combinatorial parameters of a few named classes.
//!
//! cargo run --example parameters

use hellylab::concept_class::{generate_class, ClassFamily};
use hellylab::parameters::{parameter_report, ReportOptions};

fn main() -> hellylab::Result<()> {
    let grid: Vec<f64> = (1..=8).map(f64::from).collect();
    let families = [
        (
            "intervals",
            ClassFamily::Intervals {
                grid: grid.clone(),
                include_empty: true,
            },
        ),
        (
            "thresholds+0",
            ClassFamily::Thresholds {
                grid,
                augment_all_negative: true,
            },
        ),
        (
            "singletons",
            ClassFamily::Singletons {
                n: 8,
                augment_all_negative: false,
            },
        ),
        (
            "singletons+0",
            ClassFamily::Singletons {
                n: 8,
                augment_all_negative: true,
            },
        ),
        ("hard(2,5)", ClassFamily::Hard { d: 2, k_w: 5 }),
    ];
    println!(
        "{:<14} {:>4} {:>4} {:>6} {:>4} {:>4}",
        "class", "|X|", "|H|", "vc", "k_o", "k_w"
    );
    for (name, family) in families {
        let class = generate_class(&family)?;
        let r = parameter_report(&class, &ReportOptions::default())?;
        println!(
            "{name:<14} {:>4} {:>4} {:>6} {:>4} {:>4}",
            r.points, r.hypotheses, r.vc, r.hollow_star, r.dual_helly
        );
        if let Some(star) = &r.hollow_star_set {
            let entries: Vec<String> = star
                .sample()
                .entries()
                .iter()
                .map(|e| format!("({}, {})", e.point, e.label))
                .collect();
            println!("{:14} largest hollow star: {}", "", entries.join(" "));
        }
    }
    Ok(())
}
