//! How closely herded and random exemplar sets track the class mean.
//!
//! `cargo run --release --example herding_selection`

use increlab::data::synth_blobs;
use increlab::memory::{herd_select, random_select};
use increlab::Matrix;

fn mean_of(m: &Matrix, rows: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; m.cols()];
    for &r in rows {
        for (a, v) in acc.iter_mut().zip(m.row(r)) {
            *a += v;
        }
    }
    acc.iter().map(|a| a / rows.len() as f64).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn main() -> increlab::Result<()> {
    // One class of 500 points in 16 dimensions.
    let data = synth_blobs(1, 500, 16, 1.0, 7)?;
    let features = data.inputs();
    let all: Vec<usize> = (0..data.len()).collect();
    let target = mean_of(&features, &all);

    let order = herd_select(&features, 100)?;
    println!("{:>4}  {:>10}  {:>10}", "k", "herding", "random");
    for k in [1, 2, 5, 10, 20, 50, 100] {
        let random: f64 = (0..20)
            .map(|s| random_select(data.len(), k, s).map(|idx| dist(&mean_of(&features, &idx), &target)))
            .sum::<increlab::Result<f64>>()?
            / 20.0;
        // A herded set of size k is the first k entries of the selection order.
        let herded = dist(&mean_of(&features, &order[..k]), &target);
        println!("{k:>4}  {herded:>10.4}  {random:>10.4}");
    }
    Ok(())
}
