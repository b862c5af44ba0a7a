use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

/// A list of numbers written as `0.1,0.5,1`, as a range `start:stop:step`
/// (both ends inclusive up to rounding), or any comma-separated mix.
///
/// Config files may also give a bare number or an array.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Values(String);

impl Values {
    pub fn f64s(&self) -> Result<Vec<f64>, String> {
        let mut out = Vec::new();
        for part in self.0.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let fields: Vec<&str> = part.split(':').collect();
            match fields.as_slice() {
                [v] => out.push(num(v)?),
                [lo, hi, step] => out.extend(range(num(lo)?, num(hi)?, num(step)?)?),
                _ => return Err(format!("'{part}' is neither a number nor start:stop:step")),
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(out)
    }

    pub fn usizes(&self) -> Result<Vec<usize>, String> {
        self.f64s()?
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(format!("{v} is not a nonnegative integer"))
                }
            })
            .collect()
    }
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn range(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("bad range {lo}:{hi}:{step}"));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count < 0.0 {
        return Ok(Vec::new());
    }
    if count > 1e7 {
        return Err(format!("range {lo}:{hi}:{step} has too many points"));
    }
    // lo + i*step rather than repeated addition keeps grid points exact where possible
    Ok((0..=count as usize).map(|i| lo + i as f64 * step).collect())
}

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = Values(s.to_string());
        v.f64s()?;
        Ok(v)
    }
}

impl fmt::Display for Values {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Values {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;

        impl<'de> Visitor<'de> for V {
            type Value = Values;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, an array of numbers or a list string like \"0:2:0.05\"")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Values, E> {
                s.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Values, E> {
                Ok(Values(v.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Values, E> {
                Ok(Values(v.to_string()))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Values, E> {
                Ok(Values(v.to_string()))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Values, A::Error> {
                let mut parts = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    parts.push(v.to_string());
                }
                if parts.is_empty() {
                    return Err(de::Error::custom("empty list"));
                }
                Ok(Values(parts.join(",")))
            }
        }

        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        let g: Values = "0:2:0.5".parse().unwrap();
        assert_eq!(g.f64s().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!("0:2:0.05".parse::<Values>().unwrap().f64s().unwrap().len(), 41);
        let l: Values = "200:500:100,1000".parse().unwrap();
        assert_eq!(l.usizes().unwrap(), vec![200, 300, 400, 500, 1000]);
        assert!("1.5".parse::<Values>().unwrap().usizes().is_err());
        assert!("a:b".parse::<Values>().is_err());
        assert_eq!("-1".parse::<Values>().unwrap().f64s().unwrap(), vec![-1.0]);
    }

    #[test]
    fn from_toml() {
        #[derive(Deserialize)]
        struct T {
            a: Values,
            b: Values,
            c: Values,
        }
        let t: T = toml::from_str("a = 3\nb = [1, 2.5]\nc = \"0:1:0.5\"").unwrap();
        assert_eq!(t.a.f64s().unwrap(), vec![3.0]);
        assert_eq!(t.b.f64s().unwrap(), vec![1.0, 2.5]);
        assert_eq!(t.c.f64s().unwrap(), vec![0.0, 0.5, 1.0]);
    }
}
