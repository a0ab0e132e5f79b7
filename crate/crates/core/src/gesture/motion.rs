//! Shake detection on accelerometer samples.

use std::collections::VecDeque;

use super::GestureConfig;

/// High-pass filters gravity out of raw acceleration and fires when enough
/// strong samples land inside a short window.
///
/// The gravity estimate starts at zero and follows `g' = a*g + (1-a)*sample`;
/// the linear component is `sample - g'`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShakeDetector {
    gravity: [f64; 3],
    hot: VecDeque<i64>,
    last_shake: Option<i64>,
}

impl ShakeDetector {
    /// Magnitude of the linear acceleration that `sample` would produce.
    pub fn linear_magnitude(&self, config: &GestureConfig, sample: [f64; 3]) -> f64 {
        let alpha = config.gravity_alpha;
        (0..3)
            .map(|i| {
                let g = alpha * self.gravity[i] + (1.0 - alpha) * sample[i];
                (sample[i] - g).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Feeds one sample; returns `true` when a shake fires.
    pub fn sample(&mut self, config: &GestureConfig, t: i64, accel: [f64; 3]) -> bool {
        let magnitude = self.linear_magnitude(config, accel);
        let alpha = config.gravity_alpha;
        for (g, a) in self.gravity.iter_mut().zip(accel) {
            *g = alpha * *g + (1.0 - alpha) * a;
        }
        if let Some(last) = self.last_shake {
            if t - last < config.shake_debounce_ms {
                return false;
            }
        }
        if magnitude >= config.shake_threshold_mps2 {
            self.hot.push_back(t);
        }
        while self.hot.front().is_some_and(|&h| t - h > config.shake_window_ms) {
            self.hot.pop_front();
        }
        if self.hot.len() >= config.shake_min_samples {
            self.hot.clear();
            self.last_shake = Some(t);
            return true;
        }
        false
    }

    pub fn gravity(&self) -> [f64; 3] {
        self.gravity
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Acceleration along x that yields the requested linear magnitude given
    /// the detector's current gravity estimate: linear = alpha * (a - g).
    fn accel_for(det: &ShakeDetector, cfg: &GestureConfig, linear: f64) -> [f64; 3] {
        let g = det.gravity();
        [g[0] + linear / cfg.gravity_alpha, g[1], g[2]]
    }

    fn burst(det: &mut ShakeDetector, cfg: &GestureConfig, samples: &[(i64, f64)]) -> usize {
        samples
            .iter()
            .filter(|&&(t, lin)| {
                let a = accel_for(det, cfg, lin);
                assert!((det.linear_magnitude(cfg, a) - lin).abs() < 1e-9);
                det.sample(cfg, t, a)
            })
            .count()
    }

    #[test]
    fn burst_then_debounce() {
        let cfg = GestureConfig::default();
        let mut det = ShakeDetector::default();
        assert_eq!(burst(&mut det, &cfg, &[(0, 22.0), (80, 24.0), (160, 23.0)]), 1);
        assert_eq!(burst(&mut det, &cfg, &[(400, 22.0), (480, 24.0), (560, 23.0)]), 0);
        // Debounce over: a fresh burst fires again.
        assert_eq!(burst(&mut det, &cfg, &[(1200, 22.0), (1280, 24.0), (1360, 23.0)]), 1);
    }

    #[test]
    fn samples_outside_window_do_not_accumulate() {
        let cfg = GestureConfig::default();
        let mut det = ShakeDetector::default();
        assert_eq!(burst(&mut det, &cfg, &[(0, 25.0), (400, 25.0), (901, 25.0)]), 0);
        assert_eq!(burst(&mut det, &cfg, &[(1000, 25.0), (1100, 25.0)]), 1);
    }

    #[test]
    fn resting_gravity_never_fires() {
        let cfg = GestureConfig::default();
        let mut det = ShakeDetector::default();
        let fired = (0..200).filter(|i| det.sample(&cfg, i * 20, [0.0, 0.0, 9.81])).count();
        assert_eq!(fired, 0);
        assert!((det.gravity()[2] - 9.81).abs() < 1e-6);
    }
}
