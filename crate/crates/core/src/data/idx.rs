//! IDX reader (the MNIST container format).
//!
//! Big-endian: a 4-byte magic (`0x0000_08NN`, where `08` marks unsigned
//! bytes and `NN` the number of dimensions), one 4-byte size per dimension,
//! then the raw bytes.

use std::fs;
use std::path::{Path, PathBuf};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

struct Idx<'a> {
    dims: Vec<usize>,
    payload: &'a [u8],
}

fn format_err(file: &Path, field: &'static str, detail: impl Into<String>) -> Error {
    Error::Format {
        file: file.to_path_buf(),
        field,
        detail: detail.into(),
    }
}

fn read_u32(bytes: &[u8], at: usize, file: &Path, field: &'static str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("slice of four")))
        .ok_or_else(|| format_err(file, field, "file truncated inside the header"))
}

fn parse<'a>(bytes: &'a [u8], expected_magic: u32, file: &Path) -> Result<Idx<'a>> {
    let magic = read_u32(bytes, 0, file, "magic number")?;
    if magic != expected_magic {
        return Err(format_err(
            file,
            "magic number",
            format!("expected {expected_magic:#010x}, found {magic:#010x}"),
        ));
    }
    let ndim = (magic & 0xff) as usize;
    let mut dims = Vec::with_capacity(ndim);
    for d in 0..ndim {
        dims.push(read_u32(bytes, 4 + 4 * d, file, "dimension size")? as usize);
    }
    let header = 4 + 4 * ndim;
    let expected = dims.iter().product::<usize>();
    let payload = &bytes[header..];
    if payload.len() < expected {
        return Err(format_err(
            file,
            "data section",
            format!("truncated: {} of {expected} bytes present", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(format_err(
            file,
            "data section",
            format!("{} trailing bytes after {expected}", payload.len() - expected),
        ));
    }
    Ok(Idx { dims, payload })
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn decode(
    image_bytes: &[u8],
    label_bytes: &[u8],
    images_path: &Path,
    labels_path: &Path,
    num_classes: Option<usize>,
) -> Result<Dataset> {
    let images = parse(image_bytes, IDX_IMAGES_MAGIC, images_path)?;
    let labels = parse(label_bytes, IDX_LABELS_MAGIC, labels_path)?;
    let (n, d) = (images.dims[0], images.dims[1] * images.dims[2]);
    if labels.dims[0] != n {
        return Err(format_err(
            labels_path,
            "item count",
            format!("{} labels for {n} images", labels.dims[0]),
        ));
    }
    let pixels = images.payload.iter().map(|&b| f64::from(b) / 255.0).collect();
    let labels: Vec<usize> = labels.payload.iter().map(|&b| usize::from(b)).collect();
    let k = num_classes.unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
    Dataset::new(Matrix::from_vec_unchecked(n, d, pixels), labels, k)
}

/// Loads an IDX image file and its label file; pixels are scaled to `[0, 1]`.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let (ip, lp) = (images_path.as_ref(), labels_path.as_ref());
    decode(&read(ip)?, &read(lp)?, ip, lp, None)
}

#[derive(Debug, Clone)]
pub struct MnistSplits {
    pub train: Dataset,
    pub test: Dataset,
}

fn find(dir: &Path, names: &[&str]) -> Result<PathBuf> {
    names
        .iter()
        .map(|n| dir.join(n))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            Error::io(
                dir.join(names[0]),
                std::io::Error::new(std::io::ErrorKind::NotFound, "MNIST file not found"),
            )
        })
}

/// Loads the four standard MNIST files from `dir`.
pub fn load_mnist_dir(dir: impl AsRef<Path>) -> Result<MnistSplits> {
    let dir = dir.as_ref();
    let load = |prefix: &str| -> Result<Dataset> {
        let ip = find(
            dir,
            &[
                &format!("{prefix}-images-idx3-ubyte"),
                &format!("{prefix}-images.idx3-ubyte"),
            ],
        )?;
        let lp = find(
            dir,
            &[
                &format!("{prefix}-labels-idx1-ubyte"),
                &format!("{prefix}-labels.idx1-ubyte"),
            ],
        )?;
        decode(&read(&ip)?, &read(&lp)?, &ip, &lp, Some(10))
    };
    Ok(MnistSplits {
        train: load("train")?,
        test: load("t10k")?,
    })
}
