// SPDX-License-Identifier: Apache-2.0
#include "posefollow/server.hpp"

#include "posefollow/error.hpp"
#include "posefollow/protocol.hpp"
#include "posefollow/report.hpp"
#include "posefollow/track_io.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <iostream>

namespace posefollow {

namespace {

double monotonicSeconds()
{
  using namespace std::chrono;
  return duration<double>( steady_clock::now().time_since_epoch() ).count();
}

bool sendAll( int fd, const std::string & data )
{
  std::size_t sent = 0;
  while ( sent < data.size() )
  {
    const ssize_t n = ::send( fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL );
    if ( n < 0 && errno == EINTR )
      continue;
    if ( n <= 0 )
      return false;
    sent += static_cast<std::size_t>( n );
  }
  return true;
}

void writeRecording( const std::filesystem::path & dir, int connId, const protocol::CompletedTrial & trial )
{
  const auto stem = "session-" + std::to_string( connId ) + "-" + std::to_string( trial.trialIndex );

  TrackMeta meta = trial.recording.meta();
  if ( trial.trainerPath )
    meta.session->trainerPath = std::filesystem::absolute( *trial.trainerPath ).string();
  else
  {
    // Inline trainer: keep a copy next to the recording.
    const auto trainerFile = stem + ".trainer.poses.jsonl";
    writeTrackFile( trial.trainer, dir / trainerFile );
    meta.session->trainerPath = trainerFile;
  }
  const Track recording( meta, std::vector<TrackFrame>( trial.recording.frames().begin(), trial.recording.frames().end() ) );
  writeTrackFile( recording, dir / ( stem + ".poses.jsonl" ) );

  const auto participant = trial.participant.empty() ? "conn" + std::to_string( connId ) : trial.participant;
  const ScoreReportRow row = reportRow( participant, trial.config.condition, trial.summary );
  exportReportFile( std::span( &row, 1 ), dir / ( stem + ".summary.csv" ) );
}

}  // namespace

LineServer::LineServer( ServerOptions options ) : options_( std::move( options ) ) {}

LineServer::~LineServer()
{
  stop();
}

std::uint16_t LineServer::start()
{
  listenFd_ = ::socket( AF_INET, SOCK_STREAM, 0 );
  if ( listenFd_ < 0 )
    throw Error( "io", std::string( "socket: " ) + std::strerror( errno ) );
  const int yes = 1;
  ::setsockopt( listenFd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes );

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port   = htons( options_.port );
  if ( ::inet_pton( AF_INET, options_.host.c_str(), &addr.sin_addr ) != 1 )
    throw Error( "io", "invalid listen address " + options_.host );
  if ( ::bind( listenFd_, reinterpret_cast<sockaddr *>( &addr ), sizeof addr ) < 0 )
    throw Error( "io", "bind " + options_.host + ":" + std::to_string( options_.port ) + ": " + std::strerror( errno ) );
  if ( ::listen( listenFd_, 16 ) < 0 )
    throw Error( "io", std::string( "listen: " ) + std::strerror( errno ) );

  socklen_t len = sizeof addr;
  ::getsockname( listenFd_, reinterpret_cast<sockaddr *>( &addr ), &len );

  running_      = true;
  acceptThread_ = std::thread( [this] { acceptLoop(); } );
  return ntohs( addr.sin_port );
}

void LineServer::wait()
{
  if ( acceptThread_.joinable() )
    acceptThread_.join();
}

void LineServer::stop()
{
  if ( running_.exchange( false ) )
  {
    ::shutdown( listenFd_, SHUT_RDWR );
    ::close( listenFd_ );
    std::lock_guard lock( mutex_ );
    for ( int fd : clientFds_ )
      ::shutdown( fd, SHUT_RDWR );
  }
  if ( acceptThread_.joinable() && acceptThread_.get_id() != std::this_thread::get_id() )
    acceptThread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock( mutex_ );
    workers.swap( workers_ );
  }
  for ( auto & w : workers )
    if ( w.joinable() )
      w.join();
}

void LineServer::acceptLoop()
{
  while ( running_ )
  {
    const int fd = ::accept( listenFd_, nullptr, nullptr );
    if ( fd < 0 )
    {
      if ( errno == EINTR )
        continue;
      break;
    }
    std::lock_guard lock( mutex_ );
    if ( !running_ )
    {
      ::close( fd );
      break;
    }
    clientFds_.push_back( fd );
    const int connId = ++nextConn_;
    workers_.emplace_back( [this, fd, connId] { serve( fd, connId ); } );
  }
}

void LineServer::serve( int fd, int connId )
{
  protocol::Connection conn( options_.trainer, options_.trainerPath );
  if ( options_.recordDir )
  {
    const auto dir = *options_.recordDir;
    conn.onTrialComplete( [dir, connId]( const protocol::CompletedTrial & trial ) {
      try
      {
        writeRecording( dir, connId, trial );
      }
      catch ( const Error & e )
      {
        std::cerr << "error[" << e.code() << "]: recording not written: " << e.what() << '\n';
      }
    } );
  }

  std::string buffer;
  char        chunk[4096];
  bool        open = true;
  while ( open )
  {
    const ssize_t n = ::recv( fd, chunk, sizeof chunk, 0 );
    if ( n < 0 && errno == EINTR )
      continue;
    if ( n <= 0 )
      break;
    buffer.append( chunk, static_cast<std::size_t>( n ) );

    std::size_t start = 0;
    for ( std::size_t nl; ( nl = buffer.find( '\n', start ) ) != std::string::npos; start = nl + 1 )
    {
      std::string_view line( buffer.data() + start, nl - start );
      if ( !line.empty() && line.back() == '\r' )
        line.remove_suffix( 1 );
      if ( line.empty() )
        continue;
      std::string out;
      for ( const auto & reply : conn.handleLine( line, monotonicSeconds() ) )
        out += reply + '\n';
      if ( !sendAll( fd, out ) )
      {
        open = false;
        break;
      }
    }
    buffer.erase( 0, start );
  }

  std::lock_guard lock( mutex_ );
  std::erase( clientFds_, fd );
  ::close( fd );
}

}  // namespace posefollow
