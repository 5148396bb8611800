// SPDX-License-Identifier: Apache-2.0
#pragma once

// Newline-delimited JSON protocol between a UI and the scoring engine.
// Every message is one JSON object with a "type" field.

#include "posefollow/config.hpp"
#include "posefollow/json_codec.hpp"
#include "posefollow/session.hpp"
#include "posefollow/track.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace posefollow::protocol {

inline constexpr int kProtocolVersion = 1;

namespace msg {

struct Hello
{
  int         protocolVersion = kProtocolVersion;
  int         frameWidth      = 640;
  int         frameHeight     = 360;
  std::string participant;  // optional on the wire
};
/// Partial SessionConfig; only the listed fields change.
struct Configure
{
  json::Json patch = json::Json::object();
};
struct LoadTrainer
{
  std::optional<std::string> path;
  std::shared_ptr<const Track> track;  // inline form
};
struct Play
{
  double position = 0.0;
};
struct Pause
{
  double position = 0.0;
};
struct Seek
{
  double position = 0.0;
};
struct Frame
{
  double          tCapture = 0.0;
  Pose::Keypoints keypoints{};
};
struct EndTrial
{
};

struct Welcome
{
  int protocolVersion = kProtocolVersion;
};
struct Ack
{
  std::string of;
};
struct Score
{
  double     userT;
  double     trainerT;
  FrameScore score;
};
struct Scored
{
  double userT;
};
struct Unscored
{
  double      userT;
  std::string reason;
};
struct Summary
{
  TrialSummary summary;
};
struct Error
{
  std::string code;
  std::string detail;
};

}  // namespace msg

using ClientMessage =
  std::variant<msg::Hello, msg::Configure, msg::LoadTrainer, msg::Play, msg::Pause, msg::Seek, msg::Frame, msg::EndTrial>;
using ServerMessage = std::variant<msg::Welcome, msg::Ack, msg::Score, msg::Scored, msg::Unscored, msg::Summary, msg::Error>;

/// Parses one line. Throws posefollow::Error with code "bad_message" (malformed) or
/// "unknown_type".
ClientMessage decodeClient( std::string_view line );
std::string   encodeClient( const ClientMessage & m );
std::string   encodeServer( const ServerMessage & m );

/// Everything known about a trial when end_trial produced a summary.
struct CompletedTrial
{
  int                        trialIndex;
  std::string                participant;
  SessionConfig              config;
  TrialSummary               summary;
  /// User frames as received, each with the playback position it was scored against.
  Track                      recording;
  const Track &              trainer;
  std::optional<std::string> trainerPath;
};

/// Per-connection protocol state machine. Not thread-safe; one per connection.
class Connection
{
public:
  Connection() = default;
  /// A trainer preloaded by the service counts as loaded.
  Connection( std::shared_ptr<const Track> defaultTrainer, std::optional<std::string> trainerPath );

  std::vector<ServerMessage> handle( const ClientMessage & m, double wallClock );
  /// Decodes, handles and encodes; decode failures become error messages.
  std::vector<std::string> handleLine( std::string_view line, double wallClock );

  void onTrialComplete( std::function<void( const CompletedTrial & )> callback ) { callback_ = std::move( callback ); }

  const Session * session() const noexcept { return session_ ? &*session_ : nullptr; }

private:
  std::vector<ServerMessage> dispatch( const ClientMessage & m, double wallClock );
  bool                       trialInProgress() const;

  bool                         greeted_ = false;
  int                          frameWidth_  = 640;
  int                          frameHeight_ = 360;
  std::string                  participant_;
  SessionConfig                config_;
  std::optional<Session>       session_;
  std::optional<std::string>   trainerPath_;
  int                          trials_ = 0;
  std::function<void( const CompletedTrial & )> callback_;
};

/// Re-runs a recorded session through the protocol (hello, configure, then a pause at the
/// recorded playback position before every frame, then end_trial).
/// Throws DataError("schema") when the recording lacks playback positions or session info,
/// Error(code) when the protocol reports an error.
TrialSummary replay( const Track & recording, const Track & trainer );

}  // namespace posefollow::protocol
