// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal blocking TCP client for the line protocol.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace posefollow::testing {

class LineClient
{
public:
  explicit LineClient( std::uint16_t port )
  {
    fd_ = ::socket( AF_INET, SOCK_STREAM, 0 );
    if ( fd_ < 0 )
      throw std::runtime_error( "socket" );
    sockaddr_in addr{};
    addr.sin_family      = AF_INET;
    addr.sin_port        = htons( port );
    addr.sin_addr.s_addr = htonl( INADDR_LOOPBACK );
    if ( ::connect( fd_, reinterpret_cast<sockaddr *>( &addr ), sizeof addr ) != 0 )
    {
      ::close( fd_ );
      throw std::runtime_error( "connect" );
    }
  }
  ~LineClient()
  {
    if ( fd_ >= 0 )
      ::close( fd_ );
  }
  LineClient( const LineClient & )            = delete;
  LineClient & operator=( const LineClient & ) = delete;

  void send( const std::string & line )
  {
    const std::string data = line + "\n";
    std::size_t       off  = 0;
    while ( off < data.size() )
    {
      const auto n = ::send( fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL );
      if ( n <= 0 )
        throw std::runtime_error( "send" );
      off += static_cast<std::size_t>( n );
    }
  }

  /// Next reply line, without the newline. Empty string on EOF.
  std::string receive()
  {
    for ( ;; )
    {
      if ( const auto nl = buffer_.find( '\n' ); nl != std::string::npos )
      {
        std::string line = buffer_.substr( 0, nl );
        buffer_.erase( 0, nl + 1 );
        return line;
      }
      char       chunk[4096];
      const auto n = ::recv( fd_, chunk, sizeof chunk, 0 );
      if ( n <= 0 )
        return {};
      buffer_.append( chunk, static_cast<std::size_t>( n ) );
    }
  }

  std::string request( const std::string & line )
  {
    send( line );
    return receive();
  }

private:
  int         fd_ = -1;
  std::string buffer_;
};

}  // namespace posefollow::testing
