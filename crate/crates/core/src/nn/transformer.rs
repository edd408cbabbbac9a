use ndarray::Array2;
use rand::Rng;

use super::attention::{AttentionCache, MultiHeadAttention};
use super::layers::{relu, relu_backward, LayerNorm, LayerNormCache, Linear, LinearCache};
use super::param::Param;

/// Post-norm transformer encoder layer:
/// `a = LN1(x + attn(x)); y = LN2(a + ffn(a))`.
#[derive(Debug, Clone)]
pub struct TransformerLayer {
    pub attn: MultiHeadAttention,
    pub norm1: LayerNorm,
    pub ff1: Linear,
    pub ff2: Linear,
    pub norm2: LayerNorm,
}

pub struct TransformerLayerCache {
    attn_cache: AttentionCache,
    norm1_cache: LayerNormCache,
    ff1_cache: LinearCache,
    relu_mask: Array2<f64>,
    ff2_cache: LinearCache,
    norm2_cache: LayerNormCache,
}

impl TransformerLayer {
    pub fn new<R: Rng>(dim: usize, num_heads: usize, ff_dim: usize, causal: bool, rng: &mut R) -> Self {
        TransformerLayer {
            attn: MultiHeadAttention::new(dim, num_heads, causal, rng),
            norm1: LayerNorm::new(dim),
            ff1: Linear::new(dim, ff_dim, rng),
            ff2: Linear::new(ff_dim, dim, rng),
            norm2: LayerNorm::new(dim),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, TransformerLayerCache) {
        let (attn_out, attn_cache) = self.attn.forward(x);
        let (a, norm1_cache) = self.norm1.forward(&(x + &attn_out));
        let (h, ff1_cache) = self.ff1.forward(&a);
        let (h_act, relu_mask) = relu(&h);
        let (ff_out, ff2_cache) = self.ff2.forward(&h_act);
        let (y, norm2_cache) = self.norm2.forward(&(&a + &ff_out));
        (
            y,
            TransformerLayerCache {
                attn_cache,
                norm1_cache,
                ff1_cache,
                relu_mask,
                ff2_cache,
                norm2_cache,
            },
        )
    }

    pub fn backward(
        &mut self,
        cache: &TransformerLayerCache,
        grad_out: &Array2<f64>,
    ) -> Array2<f64> {
        let g_sum2 = self.norm2.backward(&cache.norm2_cache, grad_out);
        let g_ff_out = g_sum2.clone();
        let g_hact = self.ff2.backward(&cache.ff2_cache, &g_ff_out);
        let g_h = relu_backward(&cache.relu_mask, &g_hact);
        let g_a_ff = self.ff1.backward(&cache.ff1_cache, &g_h);
        let g_a = g_sum2 + g_a_ff;

        let g_sum1 = self.norm1.backward(&cache.norm1_cache, &g_a);
        let g_attn_in = self.attn.backward(&cache.attn_cache, &g_sum1);
        g_sum1 + g_attn_in
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut p = self.attn.params_mut();
        p.extend(self.norm1.params_mut());
        p.extend(self.ff1.params_mut());
        p.extend(self.ff2.params_mut());
        p.extend(self.norm2.params_mut());
        p
    }
}

/// Stack of transformer layers with sinusoidal position information added
/// to the input.
#[derive(Debug, Clone)]
pub struct TransformerStack {
    pub layers: Vec<TransformerLayer>,
}

pub struct TransformerStackCache {
    layer_caches: Vec<TransformerLayerCache>,
}

impl TransformerStack {
    pub fn new<R: Rng>(
        num_layers: usize,
        dim: usize,
        num_heads: usize,
        ff_dim: usize,
        causal: bool,
        rng: &mut R,
    ) -> Self {
        TransformerStack {
            layers: (0..num_layers)
                .map(|_| TransformerLayer::new(dim, num_heads, ff_dim, causal, rng))
                .collect(),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, TransformerStackCache) {
        let mut h = add_positional(x);
        let mut layer_caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (next, cache) = layer.forward(&h);
            h = next;
            layer_caches.push(cache);
        }
        (h, TransformerStackCache { layer_caches })
    }

    pub fn backward(
        &mut self,
        cache: &TransformerStackCache,
        grad_out: &Array2<f64>,
    ) -> Array2<f64> {
        let mut g = grad_out.clone();
        for (layer, lc) in self
            .layers
            .iter_mut()
            .zip(cache.layer_caches.iter())
            .rev()
        {
            g = layer.backward(lc, &g);
        }
        g
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }
}

/// Sinusoidal positional encoding added to each row.
pub fn add_positional(x: &Array2<f64>) -> Array2<f64> {
    let d = x.ncols();
    let mut out = x.clone();
    for (pos, mut row) in out.rows_mut().into_iter().enumerate() {
        for i in 0..d {
            let rate = (pos as f64) / 10_000f64.powf((2 * (i / 2)) as f64 / d as f64);
            row[i] += if i % 2 == 0 { rate.sin() } else { rate.cos() };
        }
    }
    out
}
