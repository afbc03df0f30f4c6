//! Greyscale PGM input and output (8-bit).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{quantize, Image};

/// Parses binary (`P5`) or plain (`P2`) PGM with maxval up to 255.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let mut number = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| Error::Format(format!("bad PGM {what}")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    let scale = 255.0 / maxval as f64;
    let n = width * height;
    let data: Vec<f64> = match magic.as_str() {
        "P5" => {
            // exactly one whitespace byte separates header and raster
            let start = pos + 1;
            let raster = bytes
                .get(start..start + n)
                .ok_or_else(|| Error::Format("truncated PGM raster".into()))?;
            raster.iter().map(|&b| b as f64 * scale).collect()
        }
        "P2" => (0..n)
            .map(|_| number("sample").map(|v| v as f64 * scale))
            .collect::<Result<_>>()?,
        other => return Err(Error::Format(format!("not a greyscale PGM (magic `{other}`)"))),
    };
    Image::new(width, height, data).map_err(|e| Error::Format(e.to_string()))
}

/// Binary PGM bytes; samples are rounded half up and clamped to `[0, 255]`.
pub fn encode(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.as_slice().iter().map(|&v| quantize(v) as u8));
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<Image> {
    decode(&fs::read(path)?)
}

/// Writes to a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial image behind.
pub fn write(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(img))?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let img = Image::from_fn(7, 5, |x, y| (x * 30 + y * 7) as f64);
        assert_eq!(decode(&encode(&img)).unwrap(), img);
    }

    #[test]
    fn encode_rounds_and_clamps() {
        let img = Image::new(4, 1, vec![-3.0, 1.5, 2.49, 300.0]).unwrap();
        let bytes = encode(&img);
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 2, 2, 255]);
    }

    #[test]
    fn plain_format_with_comments() {
        let text = b"P2\n# comment\n3 2\n# another\n15\n0 5 10\n15 0 3\n";
        let img = decode(text).unwrap();
        assert_eq!(img.width(), 3);
        assert_eq!(img.get(1, 0), 85.0);
        assert_eq!(img.get(0, 1), 255.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decode(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(decode(b"P5\n4 4\n255\n\0\0").is_err());
        assert!(decode(b"P5\n1 1\n65535\n\0\0").is_err());
        assert!(decode(b"").is_err());
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = Image::from_fn(16, 9, |x, y| ((x ^ y) * 13 % 256) as f64);
        write(&path, &img).unwrap();
        assert_eq!(read(&path).unwrap(), img);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
