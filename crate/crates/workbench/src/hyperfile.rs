//! Hyperparameter files: `output_scale`, `lengthscales` (comma separated) and
//! `noise`, plus optional provenance keys written by `tune`.

use std::path::Path;

use mlip_uq_core::gpr::{HyperInit, Hyperparameters, KernelParams};

use crate::config::{parse_key_values, render_pairs};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperFile {
    pub hyper: Hyperparameters,
    pub mll: Option<f64>,
    pub init: Option<HyperInit>,
}

impl HyperFile {
    pub fn render(&self) -> String {
        let k = &self.hyper.kernel;
        let mut pairs = vec![
            ("output_scale", k.output_scale().to_string()),
            (
                "lengthscales",
                k.lengthscales().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("noise", self.hyper.noise.to_string()),
        ];
        if let Some(m) = self.mll {
            pairs.push(("mll", m.to_string()));
        }
        if let Some(h) = &self.init {
            pairs.push(("init_lengthscale", h.lengthscale.to_string()));
            pairs.push(("init_output_scale", h.output_scale.to_string()));
            pairs.push(("init_noise", h.noise.to_string()));
        }
        render_pairs(&[], pairs)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, Error> {
        let mut output_scale = None;
        let mut lengthscales = None;
        let mut noise = None;
        let mut mll = None;
        let mut init = [None, None, None];
        let num = |k: &str, v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("{origin}: invalid value `{v}` for `{k}`")))
        };
        for (k, v) in parse_key_values(text, origin)? {
            match k.as_str() {
                "output_scale" => output_scale = Some(num(&k, &v)?),
                "lengthscales" => {
                    lengthscales = Some(v.split(',').map(|t| num(&k, t.trim())).collect::<Result<Vec<_>, _>>()?)
                }
                "noise" => noise = Some(num(&k, &v)?),
                "mll" => mll = Some(num(&k, &v)?),
                "init_lengthscale" => init[0] = Some(num(&k, &v)?),
                "init_output_scale" => init[1] = Some(num(&k, &v)?),
                "init_noise" => init[2] = Some(num(&k, &v)?),
                _ => return Err(Error::Config(format!("{origin}: unknown hyperparameter key `{k}`"))),
            }
        }
        let missing = |k: &str| Error::Config(format!("{origin}: missing `{k}`"));
        let kernel = KernelParams::new(
            output_scale.ok_or_else(|| missing("output_scale"))?,
            lengthscales.ok_or_else(|| missing("lengthscales"))?,
        )?;
        let hyper = Hyperparameters::new(kernel, noise.ok_or_else(|| missing("noise"))?)?;
        let init = match init {
            [Some(lengthscale), Some(output_scale), Some(noise)] => Some(HyperInit {
                lengthscale,
                output_scale,
                noise,
            }),
            _ => None,
        };
        Ok(Self { hyper, mll, init })
    }

    pub fn read(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let f = HyperFile {
            hyper: Hyperparameters::new(KernelParams::new(0.1 + 0.2, vec![1.0 / 3.0, 2e-7]).unwrap(), 1e-9).unwrap(),
            mll: Some(-123.456789),
            init: Some(HyperInit {
                lengthscale: 10f64.powf(0.75),
                output_scale: 1.0,
                noise: 1e-8,
            }),
        };
        assert_eq!(HyperFile::parse(&f.render(), "t").unwrap(), f);
    }

    #[test]
    fn missing_and_invalid_values() {
        assert!(HyperFile::parse("output_scale = 1\nnoise = 0.1\n", "t").is_err());
        assert!(HyperFile::parse("output_scale = 1\nlengthscales = 1,x\nnoise = 0.1\n", "t").is_err());
        assert!(HyperFile::parse("output_scale = -1\nlengthscales = 1\nnoise = 0.1\n", "t").is_err());
    }
}
