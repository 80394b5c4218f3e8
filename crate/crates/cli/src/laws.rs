//! Law specifications accepted on the command line.
//!
//! * inline pmf: `0:0.25,1:0.5,2:0.25`
//! * named law: `point:K`, `bern:MU`, `unif:LO:HI`, `geo:P`, `geo0:P`, `yule:KMAX`
//! * file: `*.json` (a `{"offset", "probs", "tail_mass"}` object or a map
//!   `{"k": p, ...}`) or `*.csv` with header `k,p`

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use geostein::{Pmf, Start, Truncation};

pub fn parse_law(arg: &str, trunc: Truncation) -> Result<Pmf, String> {
    let arg = arg.trim();
    let path = Path::new(arg);
    if arg.ends_with(".json") || arg.ends_with(".csv") {
        return read_file(path);
    }
    if let Some((name, rest)) = arg.split_once(':') {
        if name.chars().all(|c| c.is_ascii_alphabetic()) && !name.is_empty() {
            return named(name, rest, trunc);
        }
    }
    inline(arg)
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("cannot parse {what} from {s:?}"))
}

fn named(name: &str, rest: &str, trunc: Truncation) -> Result<Pmf, String> {
    let args: Vec<&str> = rest.split(':').collect();
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("law {name} takes {n} argument(s), got {}", args.len()))
        }
    };
    let law = match name {
        "point" => {
            want(1)?;
            Ok(Pmf::point(num(args[0], "point")?))
        }
        "bern" => {
            want(1)?;
            Pmf::bernoulli(num(args[0], "mean")?)
        }
        "unif" => {
            want(2)?;
            Pmf::uniform(num(args[0], "lower end")?, num(args[1], "upper end")?)
        }
        "geo" => {
            want(1)?;
            Pmf::geometric(num(args[0], "p")?, Start::One, trunc)
        }
        "geo0" => {
            want(1)?;
            Pmf::geometric(num(args[0], "p")?, Start::Zero, trunc)
        }
        "yule" => {
            want(1)?;
            Pmf::yule_simon(num(args[0], "kmax")?)
        }
        other => return Err(format!("unknown law {other:?}")),
    };
    law.map_err(|e| e.to_string())
}

fn from_map(map: &BTreeMap<i64, f64>) -> Result<Pmf, String> {
    let lo = *map.keys().next().ok_or("empty pmf")?;
    let hi = *map.keys().next_back().unwrap();
    let mut probs = vec![0.0; (hi - lo + 1) as usize];
    for (&k, &v) in map {
        probs[(k - lo) as usize] += v;
    }
    Pmf::from_parts(lo, probs, 0.0).map_err(|e| e.to_string())
}

fn inline(arg: &str) -> Result<Pmf, String> {
    let mut map = BTreeMap::new();
    for part in arg.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| format!("expected k:p pairs, got {part:?}"))?;
        *map.entry(num::<i64>(k, "support point")?).or_insert(0.0) += num::<f64>(v, "probability")?;
    }
    from_map(&map)
}

fn read_file(path: &Path) -> Result<Pmf, String> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if path.extension().is_some_and(|e| e == "csv") {
        return Pmf::read_csv(f).map_err(|e| e.to_string());
    }
    let value: serde_json::Value =
        serde_json::from_reader(f).map_err(|e| format!("{}: {e}", path.display()))?;
    if value.get("probs").is_some() {
        return serde_json::from_value(value).map_err(|e| e.to_string());
    }
    let raw: BTreeMap<String, f64> =
        serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (k, v) in raw {
        map.insert(num::<i64>(&k, "support point")?, v);
    }
    from_map(&map)
}
