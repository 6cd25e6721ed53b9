use std::fmt::Write as _;

use xbar_mapper::{LayerDesc, LayerKind, NetworkDesc};

use crate::{Result, WorkloadError};

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn error(&self, message: impl Into<String>) -> WorkloadError {
        WorkloadError::Parse {
            file: None,
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.'))
            .unwrap_or(self.rest().len());
        let w = &self.rest()[..len];
        self.pos += len;
        w
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error(format!("expected {what}")));
        }
        let v = self.rest()[..len]
            .parse::<u32>()
            .map_err(|_| self.error(format!("{what} is out of range")))?;
        if v == 0 {
            return Err(self.error(format!("{what} must be positive")));
        }
        self.pos += len;
        Ok(v)
    }

    /// `AxB`, returning both sides.
    fn pair(&mut self, what: &str) -> Result<(u32, u32)> {
        let a = self.number(what)?;
        if self.peek() != Some('x') {
            return Err(self.error("expected `x`"));
        }
        self.pos += 1;
        let b = self.number(what)?;
        Ok((a, b))
    }

    fn repeat(&mut self) -> Result<u32> {
        if self.eat('(') {
            let t = self.number("repeat count")?;
            self.expect(')')?;
            Ok(t)
        } else {
            Ok(1)
        }
    }
}

/// Parses a network description. See the README for the grammar.
pub fn parse_network(text: &str) -> Result<NetworkDesc> {
    let mut name = None;
    let mut input = None;
    let mut rows = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut c = Cursor {
            line: i + 1,
            text: line,
            pos: 0,
        };
        last_line = i + 1;
        if c.at_end() {
            continue;
        }
        let key_col = c.column();
        let keyword = c.word();
        let misplaced = |c: &Cursor, msg: &str| WorkloadError::Parse {
            file: None,
            line: c.line,
            column: key_col,
            message: msg.to_string(),
        };
        match keyword {
            "network" => {
                if name.is_some() {
                    return Err(misplaced(&c, "duplicate `network` line"));
                }
                let n = c.word();
                if n.is_empty() {
                    return Err(c.error("expected a network name"));
                }
                name = Some(n.to_string());
            }
            "input" => {
                if input.is_some() {
                    return Err(misplaced(&c, "duplicate `input` line"));
                }
                let (w, h) = c.pair("input size")?;
                if c.peek() != Some('x') {
                    return Err(c.error("expected `x` before the channel count"));
                }
                c.pos += 1;
                let ch = c.number("channel count")?;
                input = Some((w, h, ch));
            }
            "conv" | "pool" | "fc" | "spp" | "gap" => {
                if name.is_none() || input.is_none() {
                    return Err(misplaced(
                        &c,
                        "layers must follow the `network` and `input` lines",
                    ));
                }
                rows.push(parse_layer(keyword, &mut c)?);
            }
            "" => return Err(c.error("expected a keyword")),
            other => return Err(misplaced(&c, &format!("unknown keyword `{other}`"))),
        }
        if !c.at_end() {
            return Err(c.error("unexpected trailing text"));
        }
    }
    let eof = |message: &str| WorkloadError::Parse {
        file: None,
        line: last_line,
        column: 1,
        message: message.to_string(),
    };
    let name = name.ok_or_else(|| eof("missing `network` line"))?;
    let input = input.ok_or_else(|| eof("missing `input` line"))?;
    if rows.is_empty() {
        return Err(eof("network has no layers"));
    }
    Ok(NetworkDesc::chained(&name, input, rows)?)
}

fn parse_layer(keyword: &str, c: &mut Cursor) -> Result<LayerDesc> {
    let layer = match keyword {
        "conv" => {
            let (kx, ky) = c.pair("kernel size")?;
            c.expect(',')?;
            let no = c.number("output channel count")?;
            let stride = if c.eat('/') { c.number("stride")? } else { 1 };
            let t = c.repeat()?;
            let mut l = LayerDesc::conv(kx, ky, no, stride).times(t);
            loop {
                let col = c.pos;
                match c.word() {
                    "" => break,
                    "residual" => l = l.residual(),
                    "from" => {
                        c.pos = col;
                        break;
                    }
                    other => {
                        c.pos = col;
                        return Err(c.error(format!("unknown flag `{other}`")));
                    }
                }
            }
            l
        }
        "pool" => {
            let (kx, ky) = c.pair("window size")?;
            let stride = if c.eat('/') { c.number("stride")? } else { kx };
            let mut l = LayerDesc::pool(kx, stride).times(c.repeat()?);
            l.ky = ky;
            l
        }
        "fc" => {
            let no = c.number("neuron count")?;
            LayerDesc::fc(no).times(c.repeat()?)
        }
        "spp" => {
            let mut levels = vec![c.number("pyramid level")?];
            while c.eat(',') {
                levels.push(c.number("pyramid level")?);
            }
            LayerDesc::spp(levels)
        }
        _ => LayerDesc::global_pool(),
    };
    let mut layer = layer;
    let col = c.pos;
    match c.word() {
        "from" => {
            let (w, h) = c.pair("input size")?;
            if c.peek() != Some('x') {
                return Err(c.error("expected `x` before the channel count"));
            }
            c.pos += 1;
            let ch = c.number("channel count")?;
            layer.input_w = w;
            layer.input_h = h;
            layer.ni = if layer.kind == LayerKind::Fc {
                w * h * ch
            } else {
                ch
            };
        }
        _ => c.pos = col,
    }
    Ok(layer)
}

/// Canonical text form; `parse_network` reads it back to an equal value.
pub fn write_network(net: &NetworkDesc) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "network {}", net.name);
    let _ = writeln!(s, "input {}x{}x{}", net.input_w, net.input_h, net.input_c);
    for l in &net.layers {
        let _ = write!(s, "{l}");
        if l.residual && l.kind == LayerKind::Conv {
            s.push_str(" residual");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        let n = parse_network(
            "# demo\nnetwork demo\ninput 32x32x3\nconv 3x3, 16 (2)  # two\npool 2x2/2\n\
             conv 3x3,32/2 residual\nconv 3x3, 32 residual\nspp 2,1\nfc 10\n",
        )
        .unwrap();
        assert_eq!(n.name, "demo");
        assert_eq!(n.layers.len(), 6);
        assert_eq!(n.layers[0].repeat, 2);
        assert_eq!(n.layers[2].stride, 2);
        assert_eq!(n.skip_edges().len(), 1);
        assert_eq!(n.instances().last().unwrap().ni, 32 * 5);
    }

    #[test]
    fn reports_position() {
        let err = parse_network("network x\ninput 8x8x3\nconv 3x3 16\n").unwrap_err();
        match err {
            WorkloadError::Parse { line, column, .. } => assert_eq!((line, column), (3, 10)),
            e => panic!("{e}"),
        }
        let err = parse_network("network x\ninput 8x8x3\nconv 3x3, 16 wide\n").unwrap_err();
        assert!(err.to_string().starts_with("3:14:"), "{err}");
        let err = parse_network("network x\ninput 8x8x3\nlinear 4\n").unwrap_err();
        assert!(err.to_string().starts_with("3:1:"), "{err}");
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(
            parse_network(""),
            Err(WorkloadError::Parse { .. })
        ));
        assert!(matches!(
            parse_network("network x\ninput 1x1x1\n"),
            Err(WorkloadError::Parse { .. })
        ));
    }

    #[test]
    fn stated_input_shape_is_checked() {
        let ok =
            parse_network("network x\ninput 8x8x3\nconv 3x3, 16 from 8x8x3\nfc 10 from 8x8x16\n");
        assert!(ok.is_ok(), "{ok:?}");
        let err = parse_network("network x\ninput 8x8x3\nconv 3x3, 16\nconv 3x3, 8 from 8x8x32\n")
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("#1") && err.contains("#2") && err.contains("32"),
            "{err}"
        );
    }

    #[test]
    fn round_trip() {
        let text =
            "network r\ninput 16x16x4\nconv 3x3, 8/1 (2) residual\npool 2x2/2\ngap\nfc 10 (2)\n";
        let n = parse_network(text).unwrap();
        assert_eq!(write_network(&n), text);
        assert_eq!(parse_network(&write_network(&n)).unwrap(), n);
    }
}
