use rf_lab::stimulus::*;
use rf_lab::rng::root;
use std::time::Instant;

fn main() {
    let mut rng = root(1);
    let t0 = Instant::now();
    let b = ising_batch(100, 0.7, 2000, 200, 2_000, &mut rng);
    let dt = t0.elapsed().as_secs_f64();
    let updates = (2000.0 + 2_000.0 * 200.0) * 100.0;
    println!("2000 samples n=100: {:.2}s ({:.2} ns/update), mean {:.4}", dt, dt / updates * 1e9,
        b.iter().sum::<f64>() / b.len() as f64);
}
