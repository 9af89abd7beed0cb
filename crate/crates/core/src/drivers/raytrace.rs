use rayon::prelude::*;

use crate::att::AttValue;
use crate::colour::Colour;
use crate::events::{DrawStyle, Hit, Trajectory};
use crate::geometry::VisAttributes;
use crate::scene::{Extent, Primitive};
use crate::view::{Camera, Projection, ViewParameters};
use crate::{Aabb, Ray, Solid, Transform, Vec3};

use super::{lambert, SceneSink, SinkError, SolidOrigin};

/// Remaining transmittance below which compositing stops.
const OPAQUE_CUTOFF: f64 = 1e-4;

/// 8-bit RGB raster, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    /// Binary `P6` encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>, SinkError> {
        let mut buf = Vec::new();
        let mut enc = png::Encoder::new(&mut buf, self.width, self.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let err = |e: png::EncodingError| SinkError::Render(e.to_string());
        let mut w = enc.write_header().map_err(err)?;
        w.write_image_data(&self.rgb).map_err(err)?;
        w.finish().map_err(err)?;
        Ok(buf)
    }
}

struct Traced {
    solid: Solid,
    to_local: Transform,
    to_world: Transform,
    bounds: Aabb,
    colour: Colour,
}

/// Slab test against a world-space box, ignoring the part behind the origin.
fn hits_box(b: &Aabb, ray: &Ray) -> bool {
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for (o, d, mn, mx) in [
        (ray.origin.x, ray.direction.x, b.min.x, b.max.x),
        (ray.origin.y, ray.direction.y, b.min.y, b.max.y),
        (ray.origin.z, ray.direction.z, b.min.z, b.max.z),
    ] {
        if d.abs() < 1e-300 {
            if o < mn - 1e-9 || o > mx + 1e-9 {
                return false;
            }
            continue;
        }
        let (a, c) = ((mn - o) / d, (mx - o) / d);
        lo = lo.max(a.min(c));
        hi = hi.min(a.max(c));
    }
    lo <= hi + 1e-9
}

/// Geometry-only ray tracer: one primary ray per pixel, Lambert shading with
/// an ambient floor, front-to-back blending of translucent surfaces.
pub struct RayTracer {
    extent: Extent,
    threads: Option<usize>,
    view: ViewParameters,
    objects: Vec<Traced>,
    pending: Option<(Transform, VisAttributes)>,
    image: Option<Image>,
}

impl RayTracer {
    /// `threads` fixes the worker count; `None` uses the global pool.
    pub fn new(extent: Extent, threads: Option<usize>) -> Self {
        Self { extent, threads, view: ViewParameters::default(), objects: Vec::new(), pending: None, image: None }
    }

    pub fn image(&self) -> Option<&Image> {
        self.image.as_ref()
    }

    fn camera(&self) -> Camera {
        let (centre, radius) =
            if self.extent.is_empty() { (Vec3::zero(), 1.0) } else { (self.extent.centre, self.extent.radius) };
        Camera::new(&self.view, centre, radius)
    }

    fn primary_ray(cam: &Camera, x: f64, y: f64) -> Ray {
        match cam.projection {
            Projection::Orthographic => {
                let origin = cam.target
                    + cam.right * (x * cam.half_size)
                    + cam.up * (y * cam.half_size)
                    + cam.towards * cam.distance;
                Ray::new(origin, -cam.towards)
            }
            Projection::Perspective { fov } => {
                let f = (fov / 2.0).tan();
                let eye = cam.target + cam.towards * cam.distance;
                Ray::new(eye, cam.right * (x * f) + cam.up * (y * f) - cam.towards)
            }
        }
    }

    fn shade(&self, ray: &Ray) -> Colour {
        let mut hits: Vec<(f64, usize, Vec3)> = Vec::new();
        for (i, o) in self.objects.iter().enumerate() {
            if !hits_box(&o.bounds, ray) {
                continue;
            }
            let local = ray.transformed(&o.to_local);
            for iv in o.solid.ray_intervals(&local) {
                if iv.enter.t >= 0.0 {
                    hits.push((iv.enter.t, i, o.to_world.apply_vector(iv.enter.normal)));
                }
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (mut acc, mut transmit) = ([0.0f64; 3], 1.0f64);
        for (_, i, n) in hits {
            let c = self.objects[i].colour;
            let k = lambert(n, self.view.light);
            let a = c.a.clamp(0.0, 1.0);
            acc[0] += transmit * a * c.r * k;
            acc[1] += transmit * a * c.g * k;
            acc[2] += transmit * a * c.b * k;
            transmit *= 1.0 - a;
            if transmit < OPAQUE_CUTOFF {
                break;
            }
        }
        let bg = self.view.background;
        Colour::rgb(acc[0] + transmit * bg.r, acc[1] + transmit * bg.g, acc[2] + transmit * bg.b)
    }

    fn render(&self) -> Result<Image, SinkError> {
        let (w, h) = (self.view.window.width, self.view.window.height);
        if w == 0 || h == 0 {
            return Err(SinkError::Render("image has zero size".into()));
        }
        let cam = self.camera();
        let s = w.min(h) as f64 / 2.0;
        let mut rgb = vec![0u8; 3 * w as usize * h as usize];
        let fill = |rgb: &mut [u8]| {
            rgb.par_chunks_mut(3 * w as usize).enumerate().for_each(|(row, line)| {
                let y = (h as f64 / 2.0 - (row as f64 + 0.5)) / s;
                for col in 0..w as usize {
                    let x = (col as f64 + 0.5 - w as f64 / 2.0) / s;
                    let c = self.shade(&Self::primary_ray(&cam, x, y)).to_rgb8();
                    line[3 * col..3 * col + 3].copy_from_slice(&c);
                }
            })
        };
        match self.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SinkError::Render(e.to_string()))?
                .install(|| fill(&mut rgb)),
            None => fill(&mut rgb),
        }
        Ok(Image { width: w, height: h, rgb })
    }
}

impl SceneSink for RayTracer {
    fn begin_session(&mut self, view: &ViewParameters) -> Result<(), SinkError> {
        self.view = view.clone();
        self.objects.clear();
        self.image = None;
        Ok(())
    }

    fn pre_add_solid(&mut self, transform: &Transform, vis: &VisAttributes, _: &SolidOrigin) -> Result<(), SinkError> {
        self.pending = Some((*transform, *vis));
        Ok(())
    }

    fn add_solid(&mut self, solid: &Solid) -> Result<(), SinkError> {
        let (t, vis) = self.pending.ok_or_else(|| SinkError::Protocol("add_solid without pre_add_solid".into()))?;
        self.objects.push(Traced {
            solid: solid.clone(),
            to_local: t.inverse(),
            to_world: t,
            bounds: solid.bounding_box().transformed(&t),
            colour: vis.colour,
        });
        Ok(())
    }

    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        self.pending = None;
        Ok(())
    }
    fn begin_primitives(&mut self, _: &Transform) -> Result<(), SinkError> {
        Ok(())
    }
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_primitive(&mut self, _: &Primitive) -> Result<(), SinkError> {
        Ok(())
    }
    fn end_primitives(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_trajectory(&mut self, _: &Trajectory, _: &DrawStyle, _: &[AttValue]) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_hit(&mut self, _: &Hit, _: Colour, _: &[AttValue]) -> Result<(), SinkError> {
        Ok(())
    }

    fn end_session(&mut self) -> Result<(), SinkError> {
        self.image = Some(self.render()?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::view::WindowGeometry;

    fn sphere_image(threads: Option<usize>, size: u32) -> Image {
        let view = ViewParameters {
            window: WindowGeometry { width: size, height: size, x: None, y: None },
            ..Default::default()
        };
        let mut rt = RayTracer::new(Extent::new(Vec3::zero(), 2.0), threads);
        rt.begin_session(&view).unwrap();
        let vis = VisAttributes::with_colour(Colour::RED);
        let origin = SolidOrigin::User { action: "t".into() };
        rt.pre_add_solid(&Transform::identity(), &vis, &origin).unwrap();
        rt.add_solid(&Solid::new_ball("s", 1.0).unwrap()).unwrap();
        rt.post_add_solid().unwrap();
        rt.end_session().unwrap();
        rt.image.unwrap()
    }

    #[test]
    fn centre_shaded_corner_background() {
        let img = sphere_image(None, 64);
        assert_eq!(img.pixel(0, 0), [255, 255, 255]);
        let c = img.pixel(32, 32);
        assert!(c[0] > 0 && c[1] == 0 && c[2] == 0);
    }

    #[test]
    fn ppm_and_png_encode() {
        let img = sphere_image(Some(2), 16);
        let ppm = img.to_ppm();
        assert!(ppm.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(ppm.len(), 13 + 16 * 16 * 3);
        assert!(img.to_png().unwrap().starts_with(&[0x89, b'P', b'N', b'G']));
    }
}
