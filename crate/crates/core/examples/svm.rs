//! Hard-margin SVM on a small sample and the Monte Carlo bound check.
//!
//! cargo run --release --example svm

use hellylab::concept_class::Label;
use hellylab::simulation::{svm_bench, SvmBenchConfig};
use hellylab::svm::hard_margin_svm;

fn main() -> hellylab::Result<()> {
    let points = vec![
        vec![0.0, 0.0],
        vec![1.0, 2.0],
        vec![3.0, 0.0],
        vec![4.0, 2.0],
    ];
    let labels = vec![
        Label::Negative,
        Label::Negative,
        Label::Positive,
        Label::Positive,
    ];
    let sol = hard_margin_svm(&points, &labels)?;
    println!(
        "w = {:?}, v = {:.4}, margin = {:.4}, support = {:?}",
        sol.hypothesis.weights, sol.hypothesis.threshold, sol.margin, sol.support_indices
    );

    let r = svm_bench(&SvmBenchConfig {
        dimension: 2,
        support_size: 200,
        m: 300,
        delta: 0.05,
        trials: 500,
        seed: 3,
    })?;
    println!(
        "bound {:.6}: exceeded in {}/{} trials (Wilson upper {:.4}), mean error {:.4}",
        r.bound, r.exceed_count, r.config.trials, r.wilson_95.1, r.mean_error
    );
    Ok(())
}
