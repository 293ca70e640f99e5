#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eddie/core/grid.hpp"
#include "eddie/core/params.hpp"
#include "eddie/core/transform.hpp"
#include "eddie/nav/local_planner.hpp"

namespace eddie::behaviors {

inline constexpr const char* kKeysTopic = "/keys";
inline constexpr const char* kDetectionsTopic = "/detections";
inline constexpr const char* kPhotoEventTopic = "/photo_event";

// w/x forward and back, a/d turn left and right, s stops.
std::optional<Twist> keys_to_twist(char key, const ParamSet& params);

// Goal `standoff` metres short of a face seen at `detection` (camera frame),
// facing the person. A face closer than the standoff gives the current
// position turned toward the person.
nav::NavGoal face_to_goal(Point2 detection, const Pose2D& robot, const TransformTree& tree, double standoff,
                          const ParamSet& params);

// Person position in the odom frame for a camera-frame detection.
Point2 detection_to_odom(Point2 detection, const Pose2D& robot, const TransformTree& tree);

// Trapezoidal in-place turn by a fixed angle under the yaw acceleration
// limit and min_in_place_vel_theta.
class InPlaceTurn {
 public:
  InPlaceTurn(double angle, const ParamSet& params);
  Twist next(const Twist& prev);
  bool done() const { return done_; }
  double remaining() const { return remaining_; }

 private:
  double remaining_;  // signed rad
  double dt_, acc_, max_rate_;
  bool done_ = false;
};

enum class Mode { kExploring, kApproaching, kCapturing, kResuming, kIdle };
const char* to_string(Mode m);

enum class NavOutcome { kIdle, kActive, kSucceeded, kAborted };

struct Detection {
  std::string person_id;
  Point2 camera;  // camera frame, m
};

struct BehaviorConfig {
  double standoff = 1.0;   // m
  double cooldown = 300.0; // s before a person may be approached again
};

struct BehaviorState {
  Mode mode = Mode::kExploring;
  std::optional<nav::NavGoal> target;
  std::optional<std::string> person;  // being approached or captured
  Point2 person_position;             // odom frame
  std::map<std::string, double> visited;    // id -> capture time
  std::map<std::string, double> attempted;  // id -> time of a failed approach
};

struct BehaviorInput {
  double now = 0.0;
  Pose2D robot;
  std::vector<Detection> detections;
  NavOutcome nav = NavOutcome::kIdle;
  std::optional<nav::NavGoal> exploration_goal;  // none when no frontier is left
  bool action_done = false;  // capture written (CAPTURING) or turn finished (RESUMING)
};

enum class ActionKind { kSendGoal, kCapture, kRotate, kStop };
const char* to_string(ActionKind a);

struct Action {
  ActionKind kind = ActionKind::kStop;
  std::optional<nav::NavGoal> goal;
  std::string person_id;
};

struct BehaviorStep {
  BehaviorState state;
  std::vector<Action> actions;
};

// Whether a person may be approached at `now`.
bool approachable(const BehaviorState& s, const std::string& id, double now, const BehaviorConfig& cfg);

BehaviorStep behavior_step(const BehaviorState& state, const BehaviorInput& in, const TransformTree& tree,
                           const BehaviorConfig& cfg, const ParamSet& params);

struct PhotoRecord {
  std::string person_id;
  Pose2D robot_pose;
  Point2 person_position;
  double stamp = 0.0;
  int sequence = 0;
  std::filesystem::path snapshot;  // PGM of the map around the robot
  std::filesystem::path record;    // JSON
  bool saved = false;
  std::string error;
};

// Writes photo_<seq>.json and photo_<seq>.pgm (a 3 m square of the map
// centred on the robot) into `dir`. Storage failures are logged and
// reported in the record, never thrown.
PhotoRecord capture_photo(const TriStateMap& map, const std::string& person_id, const Pose2D& robot,
                          Point2 person_position, double stamp, int sequence, const std::filesystem::path& dir);

}  // namespace eddie::behaviors
