// Scores one prediction against one ground truth and prints the EC-IoU gradient.

#include <cstdio>

#include "safedet/safedet.hpp"

int main() {
  using namespace safedet;

  const Box3D gt{{10.0, 0.0, 0.0}, 2.0, 4.5, 1.5, 0.0, "car", std::nullopt};
  Box3D near = gt;
  near.center.x -= 0.5;
  Box3D far = gt;
  far.center.x += 0.5;

  const CameraModel cam = CameraModel::front_facing(1.0, {0.0, 0.0, 1.0});
  const eciou::EcIouParams params{2.0};

  for (const auto& [name, p] : {std::pair{"ego-ward", near}, std::pair{"away", far}}) {
    const usc::UscResult u = usc::usc_pair(p, gt, cam);
    std::printf("%-9s IoU %.4f  EC-IoU %.4f  IoGT %.4f  ADR %.4f  USC %.4f  usc_ok %d\n", name, eciou::bev_iou(p, gt),
                eciou::ec_iou(p, gt, {}, params), u.iogt, u.adr, u.usc, u.usc_ok ? 1 : 0);
  }

  const eciou::GradResult g = eciou::ec_iou_grad(far, gt, {}, params);
  std::printf("d EC-IoU / d(cx, cy, w, l, yaw) at the away box: %.5f %.5f %.5f %.5f %.5f\n", g.grad.d_cx, g.grad.d_cy,
              g.grad.d_w, g.grad.d_l, g.grad.d_yaw);
  return 0;
}
