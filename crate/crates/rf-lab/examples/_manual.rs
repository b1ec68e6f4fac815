use ndarray::{Array1, Array2};
use rf_lab::nets::*;
use rf_lab::stimulus::*;
use rf_lab::rng::root;

fn loss_of(params: &TwoLayerParams, model: &StimulusModel, batches: usize) -> f64 {
    let mut rng = root(99);
    let mut acc = 0.0;
    for _ in 0..batches {
        let b = task_sample(model, 2000, &mut rng).unwrap();
        acc += mse_and_grad(params, &b).unwrap().0;
    }
    acc / batches as f64
}

fn main() {
    let n = 40usize;
    let hidden = 10usize;
    let model = StimulusModel::kur(n, 10.0, &[0.3, 0.7]).unwrap();
    // hand-built localized committee: bump of given height/width at evenly spaced positions
    for height in [1.0, 2.0, 4.0, 8.0] {
        for width in [1usize, 2] {
            let mut w1 = Array2::zeros((hidden, n));
            for m in 0..hidden {
                let c = 4 * m;
                for d in 0..=width {
                    let v = height * (-((d * d) as f64) / (width as f64)).exp();
                    w1[(m, c)] = height;
                    if d > 0 {
                        w1[(m, (c + d) % n)] = v;
                        w1[(m, (c + n - d) % n)] = v;
                    }
                }
            }
            let params = TwoLayerParams {
                w1,
                b1: Array1::zeros(hidden),
                w2: Array1::from_elem(hidden, 1.0 / hidden as f64),
                b2: 0.0,
                activation: Activation::Relu,
                mask: ArchPreset::Scm { hidden, activation: Activation::Relu }.mask(),
            };
            println!("bump h={height} w={width}: loss {:.4}", loss_of(&params, &model, 8));
        }
    }
    // reference: what the trained collective solution scores
    println!("(collective GD solution reference: ~0.237)");
}
