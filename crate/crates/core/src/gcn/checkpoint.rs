//! Text checkpoint with bit-exact weights.
//!
//! ```text
//! sdnguard-gcn 1
//! layers 2
//! dims 8 128 2
//! learning_rate 0.15
//! ...
//! weights 0 8 128
//! <row-major IEEE-754 bit patterns in hex, one matrix row per line>
//! ```

use std::io::{BufRead, Write};

use ndarray::Array2;

use super::{GcnError, GcnModel, Hyperparams};

const MAGIC: &str = "sdnguard-gcn 1";

pub fn save<W: Write>(mut w: W, model: &GcnModel) -> Result<(), GcnError> {
    let hp = &model.hyperparams;
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "layers {}", model.layers())?;
    let mut dims = vec![model.input_dim()];
    dims.extend(model.weights.iter().map(|m| m.ncols()));
    writeln!(
        w,
        "dims {}",
        dims.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    writeln!(w, "learning_rate {:016x}", hp.learning_rate.to_bits())?;
    writeln!(w, "hidden_width {}", hp.hidden_width)?;
    writeln!(w, "weight_decay {:016x}", hp.weight_decay.to_bits())?;
    writeln!(w, "dropout {:016x}", hp.dropout.to_bits())?;
    writeln!(w, "epochs {}", hp.epochs)?;
    writeln!(w, "seed {}", hp.seed)?;
    for (l, m) in model.weights.iter().enumerate() {
        writeln!(w, "weights {l} {} {}", m.nrows(), m.ncols())?;
        for row in m.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|v| format!("{:016x}", v.to_bits()))
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> GcnError {
    GcnError::Checkpoint(msg.into())
}

struct Lines<R>(std::io::Lines<R>);

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String, GcnError> {
        Ok(self
            .0
            .next()
            .ok_or_else(|| bad("unexpected end of file"))??)
    }

    fn field(&mut self, name: &str) -> Result<String, GcnError> {
        let line = self.next()?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(format!("expected `{name}`, got `{line}`")))
    }
}

pub fn load<R: BufRead>(r: R) -> Result<GcnModel, GcnError> {
    let mut lines = Lines(r.lines());
    if lines.next()? != MAGIC {
        return Err(bad("not a sdnguard-gcn v1 checkpoint"));
    }
    let parse_usize = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad(format!("bad integer `{s}`")))
    };
    let parse_bits = |s: &str| {
        u64::from_str_radix(s.trim(), 16)
            .map(f64::from_bits)
            .map_err(|_| bad(format!("bad hex float `{s}`")))
    };

    let layers = parse_usize(&lines.field("layers")?)?;
    let dims: Vec<usize> = lines
        .field("dims")?
        .split_whitespace()
        .map(parse_usize)
        .collect::<Result<_, _>>()?;
    if layers == 0 || dims.len() != layers + 1 {
        return Err(bad("layer count and dims disagree"));
    }
    let hyperparams = Hyperparams {
        learning_rate: parse_bits(&lines.field("learning_rate")?)?,
        layers,
        hidden_width: parse_usize(&lines.field("hidden_width")?)?,
        weight_decay: parse_bits(&lines.field("weight_decay")?)?,
        dropout: parse_bits(&lines.field("dropout")?)?,
        epochs: parse_usize(&lines.field("epochs")?)?,
        seed: lines
            .field("seed")?
            .trim()
            .parse()
            .map_err(|_| bad("bad seed"))?,
    };
    let mut weights = Vec::with_capacity(layers);
    for l in 0..layers {
        let header = lines.field("weights")?;
        let parts: Vec<usize> = header
            .split_whitespace()
            .map(parse_usize)
            .collect::<Result<_, _>>()?;
        if parts != [l, dims[l], dims[l + 1]] {
            return Err(bad(format!(
                "weights header `{header}` does not match dims"
            )));
        }
        let (rows, cols) = (dims[l], dims[l + 1]);
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines.next()?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(parse_bits)
                .collect::<Result<_, _>>()?;
            if vals.len() != cols {
                return Err(bad(format!(
                    "row of layer {l} has {} values, expected {cols}",
                    vals.len()
                )));
            }
            data.extend(vals);
        }
        weights.push(Array2::from_shape_vec((rows, cols), data).map_err(|e| bad(e.to_string()))?);
    }
    Ok(GcnModel {
        weights,
        hyperparams,
    })
}
