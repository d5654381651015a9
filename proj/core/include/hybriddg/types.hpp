#pragma once

#include <Eigen/Core>
#include <string>

namespace hdg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ElemType { hex = 0, wedge = 1, pyramid = 2, tet = 3 };
enum class FaceType { tri, quad };

inline constexpr ElemType all_elem_types[] = {ElemType::hex, ElemType::wedge, ElemType::pyramid,
                                              ElemType::tet};

std::string to_string(ElemType t);
ElemType elem_type_from_string(const std::string& s);

int num_vertices(ElemType t);
int num_faces(ElemType t);

}  // namespace hdg
