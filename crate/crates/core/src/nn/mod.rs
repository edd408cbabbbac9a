//! Minimal tensor layers with explicit forward/backward passes. Training
//! runs in f64 for stable gradient checks; weights serialize as f32.

mod attention;
mod container;
mod layers;
mod param;
mod transformer;

pub use attention::MultiHeadAttention;
pub use container::ModelContainer;
pub use layers::{
    relu, relu_backward, softmax_rows, LayerNorm, Linear, LinearCache, SparseLinear,
    SparseLinearCache,
};
pub use param::{AdamConfig, Param};
pub use transformer::{add_positional, TransformerLayer, TransformerStack, TransformerStackCache};

#[cfg(test)]
mod grad_check {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = 1e-6;

    fn rand_input(rng: &mut ChaCha8Rng, t: usize, d: usize) -> Array2<f64> {
        use rand::Rng;
        Array2::from_shape_fn((t, d), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn linear_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layer = Linear::new(5, 4, &mut rng);
        let x = rand_input(&mut rng, 3, 5);
        let wl = rand_input(&mut rng, 3, 4);
        let loss = |layer: &Linear, x: &Array2<f64>| (layer.forward(x).0 * &wl).sum();

        let mut working = layer.clone();
        let (_, cache) = working.forward(&x);
        let gx = working.backward(&cache, &wl);

        // weight gradient
        for idx in [(0, 0), (4, 3)] {
            let mut perturbed = layer.clone();
            let orig = perturbed.w.value[idx];
            perturbed.w.value[idx] = orig + H;
            let up = loss(&perturbed, &x);
            perturbed.w.value[idx] = orig - H;
            let down = loss(&perturbed, &x);
            let numeric = (up - down) / (2.0 * H);
            assert!((working.w.grad[idx] - numeric).abs() < 1e-6);
        }

        // input gradient
        let mut x2 = x.clone();
        let orig = x2[[1, 2]];
        x2[[1, 2]] = orig + H;
        let up = loss(&layer, &x2);
        x2[[1, 2]] = orig - H;
        let down = loss(&layer, &x2);
        let numeric = (up - down) / (2.0 * H);
        assert!((gx[[1, 2]] - numeric).abs() < 1e-6);
    }

    #[test]
    fn layer_norm_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let layer = LayerNorm::new(6);
        let x = rand_input(&mut rng, 4, 6);
        let wl = rand_input(&mut rng, 4, 6);

        let mut working = layer.clone();
        let (_, cache) = working.forward(&x);
        let gx = working.backward(&cache, &wl);

        for idx in [(0, 0), (2, 3), (3, 5)] {
            let mut x2 = x.clone();
            let orig = x2[idx];
            x2[idx] = orig + H;
            let up = (layer.forward(&x2).0 * &wl).sum();
            x2[idx] = orig - H;
            let down = (layer.forward(&x2).0 * &wl).sum();
            let numeric = (up - down) / (2.0 * H);
            assert!(
                (gx[idx] - numeric).abs() < 1e-5,
                "at {idx:?}: analytic {}, numeric {numeric}",
                gx[idx]
            );
        }
    }

    #[test]
    fn attention_input_gradients_match_finite_differences() {
        for causal in [false, true] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let layer = MultiHeadAttention::new(8, 2, causal, &mut rng);
            let x = rand_input(&mut rng, 4, 8);
            let wl = rand_input(&mut rng, 4, 8);

            let mut working = layer.clone();
            let (_, cache) = working.forward(&x);
            let gx = working.backward(&cache, &wl);

            for idx in [(0, 0), (1, 4), (3, 7)] {
                let mut x2 = x.clone();
                let orig = x2[idx];
                x2[idx] = orig + H;
                let up = (layer.forward(&x2).0 * &wl).sum();
                x2[idx] = orig - H;
                let down = (layer.forward(&x2).0 * &wl).sum();
                let numeric = (up - down) / (2.0 * H);
                assert!(
                    (gx[idx] - numeric).abs() < 1e-5,
                    "causal={causal} at {idx:?}: analytic {}, numeric {numeric}",
                    gx[idx]
                );
            }
        }
    }

    #[test]
    fn transformer_layer_input_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let layer = TransformerLayer::new(8, 2, 16, false, &mut rng);
        let x = rand_input(&mut rng, 3, 8);
        let wl = rand_input(&mut rng, 3, 8);

        let mut working = layer.clone();
        let (_, cache) = working.forward(&x);
        let gx = working.backward(&cache, &wl);

        for idx in [(0, 1), (2, 6)] {
            let mut x2 = x.clone();
            let orig = x2[idx];
            x2[idx] = orig + H;
            let up = (layer.forward(&x2).0 * &wl).sum();
            x2[idx] = orig - H;
            let down = (layer.forward(&x2).0 * &wl).sum();
            let numeric = (up - down) / (2.0 * H);
            assert!(
                (gx[idx] - numeric).abs() < 1e-4,
                "at {idx:?}: analytic {}, numeric {numeric}",
                gx[idx]
            );
        }
    }

    #[test]
    fn sparse_linear_matches_dense_multi_hot() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let layer = SparseLinear::new(10, 4, &mut rng);
        let indices = vec![vec![0, 3, 7], vec![], vec![9]];
        let (y, _) = layer.forward(&indices);

        let mut dense = Array2::zeros((3, 10));
        for (t, active) in indices.iter().enumerate() {
            for &i in active {
                dense[[t, i]] = 1.0;
            }
        }
        let expected = dense.dot(&layer.w.value) + &layer.b.value;
        let diff = (&y - &expected).mapv(f64::abs).sum();
        assert!(diff < 1e-12);
    }
}
