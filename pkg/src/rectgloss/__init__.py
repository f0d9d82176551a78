"""Rectangle-proxy approximation of one-bounce glossy interreflection.

Reflectors are rectangles; for each receiver point the reflected light of a
distant light is gathered on a disk around the specular peak, fitted with an
anisotropic spherical Gaussian and convolved with the receiver's GGX lobe.
A brute-force Monte Carlo reference ships alongside for validation.
"""

from .brdf import (
    GrazingAngleError,
    Material,
    brdf_eval,
    ggx_ndf,
    ggx_sample_half_vector,
    ndf_as_sg,
    warp_ndf_to_light_domain,
)
from .interreflect import (
    DiskRadiance,
    ShadingPoint,
    SpecularPeak,
    attenuation_axes,
    build_asg_light,
    exact_integrand,
    find_specular_peak,
    fitted_integrand,
    integrate_disk_radiance,
    k_factor,
    peak_radiance,
    shade_indirect_specular,
)
from .oracle import (
    QuadratureSpec,
    convolution_error_report,
    fit_error_report,
    mc_one_bounce,
    spherical_quadrature,
)
from .renderer import Image, image_metrics, read_image, relative_rmse, render, write_image
from .scene import (
    Camera,
    DirectionalLight,
    RectangleProxy,
    SamplingDisk,
    Scene,
    SceneError,
    intersection_area_fraction,
    load_scene,
    parse_scene,
    query_proxies,
    ray_scene_intersect,
)
from .sg import (
    AnisotropicSphericalGaussian,
    SphericalGaussian,
    asg_integral,
    asg_to_sg,
    convolve_sg_asg,
    eval_asg,
    eval_asg_polar,
    eval_sg,
    sg_product_integral,
)

__version__ = "0.1.0"
