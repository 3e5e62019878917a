//! Interleaved 8-bit RGB image buffer with binary PPM (P6) ingestion.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::vision::SpatialRes;

/// An axis-aligned pixel rectangle, `x`/`y` top-left inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Rect {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }
}

/// An 8-bit RGB image.
#[derive(Clone, PartialEq, Eq)]
pub struct ImagePlane {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImagePlane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ImagePlane({}x{})", self.width, self.height)
    }
}

impl ImagePlane {
    /// A black image of the given size.
    pub fn new(width: u32, height: u32) -> Result<ImagePlane> {
        if width == 0 || height == 0 {
            return Err(Error::Param(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        let len = width as usize * height as usize * 3;
        Ok(ImagePlane {
            width,
            height,
            data: vec![0; len],
        })
    }

    pub fn from_rgb(width: u32, height: u32, data: Vec<u8>) -> Result<ImagePlane> {
        let expect = width as usize * height as usize * 3;
        if width == 0 || height == 0 || data.len() != expect {
            return Err(Error::Param(format!(
                "RGB buffer of {} bytes does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(ImagePlane {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn res(&self) -> SpatialRes {
        SpatialRes {
            width: self.width,
            height: self.height,
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    #[inline]
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    #[inline]
    pub fn set_rgb(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&rgb);
    }

    /// Rec.601 luminance in `[0, 255]`.
    #[inline]
    pub fn luma(&self, x: u32, y: u32) -> f64 {
        let [r, g, b] = self.rgb(x, y);
        0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64
    }

    /// Copies the pixels of `rect` into a new image.
    pub fn crop(&self, rect: Rect) -> Result<ImagePlane> {
        if !self.bounds().contains(&rect) || rect.w == 0 || rect.h == 0 {
            return Err(Error::Param(format!(
                "crop {rect:?} outside {}x{} image",
                self.width, self.height
            )));
        }
        let mut out = Vec::with_capacity(rect.w as usize * rect.h as usize * 3);
        for y in rect.y..rect.bottom() {
            let start = self.offset(rect.x, y);
            let end = start + rect.w as usize * 3;
            out.extend_from_slice(&self.data[start..end]);
        }
        ImagePlane::from_rgb(rect.w, rect.h, out)
    }

    /// Writes `src` with its top-left corner at `(x, y)`.
    pub fn paste(&mut self, src: &ImagePlane, x: u32, y: u32) -> Result<()> {
        let dst = Rect::new(x, y, src.width, src.height);
        if !self.bounds().contains(&dst) {
            return Err(Error::Param(format!(
                "paste {dst:?} outside {}x{} image",
                self.width, self.height
            )));
        }
        for row in 0..src.height {
            let s = src.offset(0, row);
            let d = self.offset(x, y + row);
            self.data[d..d + src.width as usize * 3]
                .copy_from_slice(&src.data[s..s + src.width as usize * 3]);
        }
        Ok(())
    }
}

fn read_token(bytes: &[u8], pos: &mut usize) -> Result<Vec<u8>> {
    // Skip whitespace and `#` comments.
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Parse("unexpected end of PPM header".into()));
    }
    Ok(bytes[start..*pos].to_vec())
}

fn parse_header_u32(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    let tok = read_token(bytes, pos)?;
    std::str::from_utf8(&tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad {what} in PPM header")))
}

/// Decodes a binary (P6) portable pixmap with 8-bit samples.
pub fn decode_ppm(bytes: &[u8]) -> Result<ImagePlane> {
    let mut pos = 0usize;
    let magic = read_token(bytes, &mut pos)?;
    if magic != b"P6" {
        return Err(Error::Parse("not a binary PPM (expected P6 magic)".into()));
    }
    let width = parse_header_u32(bytes, &mut pos, "width")?;
    let height = parse_header_u32(bytes, &mut pos, "height")?;
    let maxval = parse_header_u32(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Parse(format!(
            "unsupported PPM maxval {maxval} (only 8-bit supported)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width as usize * height as usize * 3;
    if bytes.len() < pos + need {
        return Err(Error::Parse(format!(
            "PPM raster truncated: need {need} bytes, have {}",
            bytes.len().saturating_sub(pos)
        )));
    }
    ImagePlane::from_rgb(width, height, bytes[pos..pos + need].to_vec())
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<ImagePlane> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes)
}

pub fn encode_ppm(img: &ImagePlane) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn write_ppm(path: impl AsRef<Path>, img: &ImagePlane) -> Result<()> {
    let path = path.as_ref();
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&encode_ppm(img)))
        .map_err(|e| Error::io(path, e))
}
