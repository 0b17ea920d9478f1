use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use fprange::alphabet::Alphabet;
use fprange::error::{Error, Result};
use fprange::field::PrimeField;
use fprange::parse::{parse_poly, parse_poly_n};
use fprange::poly::MultiPoly;
use fprange::quad::SupportThreshold;
use fprange::spectrum::Enumeration;
use serde::Serialize;

/// Flags shared by every command. Each may also be given as a `key=value`
/// token; remaining tokens without `=` are polynomials.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Alphabet: `0,1,4` or `all`.
    #[arg(long = "S", value_name = "LIST")]
    pub s: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub t: Option<u32>,
    /// Maximum number of points (or candidates) enumerated.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `exact` or a coordinate count.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Also write the report to this file.
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Polynomials starting with `-` go after `--`.
    #[arg(value_name = "KEY=VALUE|POLY")]
    pub tokens: Vec<String>,
}

/// Settings after merging flags and tokens.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub p: Option<u64>,
    pub n: Option<usize>,
    #[serde(rename = "S")]
    pub s: Option<String>,
    pub d: Option<u32>,
    pub t: Option<u32>,
    pub budget: Option<u64>,
    pub seed: u64,
    pub threshold: Option<String>,
    pub extra: BTreeMap<String, String>,
    pub polys: Vec<String>,
    #[serde(skip)]
    pub json: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("`{key}` expects a number, got `{v}`")))
}

impl RunConfig {
    pub fn from_args(args: CommonArgs, threads: Option<usize>) -> Result<Self> {
        let mut cfg = RunConfig {
            p: args.p,
            n: args.n,
            s: args.s,
            d: args.d,
            t: args.t,
            budget: args.budget,
            seed: args.seed.unwrap_or(0),
            threshold: args.threshold,
            extra: BTreeMap::new(),
            polys: Vec::new(),
            json: args.json,
            threads,
        };
        let seed_flag = args.seed.is_some();
        for tok in args.tokens {
            let Some((k, v)) = tok.split_once('=') else {
                cfg.polys.push(tok);
                continue;
            };
            let (k, v) = (k.trim(), v.trim().to_string());
            match k {
                "p" => cfg.p = cfg.p.or(Some(parse_num(k, &v)?)),
                "n" => cfg.n = cfg.n.or(Some(parse_num(k, &v)?)),
                "S" | "s" => cfg.s = cfg.s.or(Some(v)),
                "d" => cfg.d = cfg.d.or(Some(parse_num(k, &v)?)),
                "t" => cfg.t = cfg.t.or(Some(parse_num(k, &v)?)),
                "budget" => cfg.budget = cfg.budget.or(Some(parse_num(k, &v)?)),
                "seed" if !seed_flag => cfg.seed = parse_num(k, &v)?,
                "seed" => {}
                "threshold" => cfg.threshold = cfg.threshold.or(Some(v)),
                _ => {
                    cfg.extra.insert(k.to_string(), v);
                }
            }
        }
        Ok(cfg)
    }

    pub fn field(&self) -> Result<PrimeField> {
        let p = self.p.ok_or_else(|| Error::Invalid("missing p".into()))?;
        PrimeField::new(p)
    }

    pub fn alphabet(&self, field: PrimeField) -> Result<Alphabet> {
        Alphabet::parse(field, self.s.as_deref().unwrap_or("all"))
    }

    pub fn enumeration(&self) -> Enumeration {
        let mut e = match self.budget {
            Some(b) => Enumeration::with_budget(b),
            None => Enumeration::default(),
        };
        if self.threads == Some(1) {
            e = e.serial();
        }
        e
    }

    /// All polynomials on a common number of variables (`n`, or the largest
    /// index used).
    pub fn polys(&self, field: PrimeField) -> Result<Vec<MultiPoly>> {
        if self.polys.is_empty() {
            return Err(Error::Invalid("no polynomial given".into()));
        }
        match self.n {
            Some(n) => self.polys.iter().map(|t| parse_poly_n(t, field, n)).collect(),
            None => {
                let ps: Vec<MultiPoly> = self.polys.iter().map(|t| parse_poly(t, field)).collect::<Result<_>>()?;
                let n = ps.iter().map(|p| p.nvars()).max().unwrap_or(0).max(1);
                Ok(ps.into_iter().map(|p| p.with_nvars(n)).collect())
            }
        }
    }

    pub fn poly(&self, field: PrimeField) -> Result<MultiPoly> {
        let mut ps = self.polys(field)?;
        if ps.len() != 1 {
            return Err(Error::Invalid(format!("expected one polynomial, got {}", ps.len())));
        }
        Ok(ps.remove(0))
    }

    pub fn threshold(&self) -> Result<SupportThreshold> {
        match self.threshold.as_deref() {
            None | Some("exact") => Ok(SupportThreshold::Exact),
            Some(v) => Ok(SupportThreshold::Fixed(parse_num("threshold", v)?)),
        }
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.extra.get(key).map(|v| parse_num(key, v)).transpose()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.extra.get(key).map(String::as_str)
    }

    pub fn get_bool(&self, key: &str) -> Result<bool> {
        match self.get_str(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Error::Invalid(format!("`{key}` expects true/false, got `{v}`"))),
        }
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<u64>>> {
        self.get_str(key)
            .map(|v| v.split(',').map(|x| parse_num(key, x)).collect())
            .transpose()
    }
}
